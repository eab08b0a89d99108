#include "catcast/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "catcast/rng.hpp"

namespace catcast {

using json = nlohmann::json;

namespace {

constexpr const char* kMagic = "CATCAST-MODEL 1";

std::vector<unsigned char> payload_bytes(const std::vector<double>& payload) {
    std::vector<unsigned char> bytes(payload.size() * 8);
    for (std::size_t i = 0; i < payload.size(); ++i) {
        std::uint64_t u;
        std::memcpy(&u, &payload[i], 8);
        if constexpr (std::endian::native == std::endian::big) u = std::byteswap(u);
        std::memcpy(bytes.data() + i * 8, &u, 8);
    }
    return bytes;
}

std::string checksum_hex(const std::vector<unsigned char>& bytes) {
    const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError(std::string("truncated artifact: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

json layer_to_json(const LayerSpec& l) {
    switch (l.kind) {
        case LayerSpec::Kind::dense:
            return {{"kind", "dense"}, {"units", l.units}, {"activation", to_string(l.act)}};
        case LayerSpec::Kind::conv1d:
            return {{"kind", "conv1d"}, {"filters", l.filters}, {"kernel", l.kernel},
                    {"activation", to_string(l.act)}};
        case LayerSpec::Kind::maxpool1d:
            return {{"kind", "maxpool1d"}, {"pool", l.pool}};
        case LayerSpec::Kind::dropout:
            return {{"kind", "dropout"}, {"rate", l.rate}};
        case LayerSpec::Kind::flatten:
            return {{"kind", "flatten"}};
        case LayerSpec::Kind::softmax_output:
            return {{"kind", "softmax_output"}, {"classes", l.classes}};
    }
    throw FormatError("unserializable layer");
}

LayerSpec layer_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dense")
        return LayerSpec::dense(j.at("units").get<int>(),
                                activation_from_string(j.at("activation").get<std::string>()));
    if (kind == "conv1d")
        return LayerSpec::conv1d(j.at("filters").get<int>(), j.at("kernel").get<int>(),
                                 activation_from_string(j.at("activation").get<std::string>()));
    if (kind == "maxpool1d") return LayerSpec::maxpool1d(j.at("pool").get<int>());
    if (kind == "dropout") return LayerSpec::dropout(j.at("rate").get<double>());
    if (kind == "flatten") return LayerSpec::flatten();
    if (kind == "softmax_output") return LayerSpec::softmax_output(j.at("classes").get<int>());
    throw FormatError("unknown layer kind '" + kind + "'");
}

} // namespace

json schema_to_json(const Schema& schema) {
    json out = json::array();
    for (const auto& v : schema.vars())
        out.push_back({{"name", v.name},
                       {"role", to_string(v.role)},
                       {"vocabulary", v.vocab.entries()}});
    return out;
}

Schema schema_from_json(const json& j) {
    std::vector<VariableSpec> vars;
    for (const auto& vj : j) {
        VariableSpec v;
        v.name = vj.at("name").get<std::string>();
        v.role = var_role_from_string(vj.at("role").get<std::string>());
        v.vocab = Vocabulary(vj.at("vocabulary").get<std::vector<std::string>>());
        vars.push_back(std::move(v));
    }
    return Schema(std::move(vars));
}

void write_artifact(const std::string& path, const json& header,
                    const std::vector<double>& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write artifact '" + path + "'");
    const std::string head = header.dump();
    const auto bytes = payload_bytes(payload);
    out << kMagic << '\n';
    out << "HEADER " << head.size() << '\n';
    out << head << '\n';
    out << "PAYLOAD " << payload.size() << '\n';
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out << "\nCHECKSUM " << checksum_hex(bytes) << '\n';
    if (!out) throw FormatError("failed writing artifact '" + path + "'");
}

std::pair<json, std::vector<double>> read_artifact(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open artifact '" + path + "'");

    const std::string magic = read_line(in, "magic");
    if (magic != kMagic) {
        if (magic.rfind("CATCAST-MODEL", 0) == 0)
            throw FormatError("artifact version mismatch: got '" + magic + "', expected '" +
                              kMagic + "'");
        throw FormatError("not a catcast model artifact");
    }

    const std::string header_line = read_line(in, "header length");
    std::size_t header_len = 0;
    if (std::sscanf(header_line.c_str(), "HEADER %zu", &header_len) != 1)
        throw FormatError("malformed header length line");
    std::string head(header_len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(header_len));
    if (in.gcount() != static_cast<std::streamsize>(header_len))
        throw FormatError("truncated artifact header");
    if (in.get() != '\n') throw FormatError("malformed artifact header terminator");

    json header;
    try {
        header = json::parse(head);
    } catch (const json::exception& e) {
        throw FormatError(std::string("artifact header is not valid JSON: ") + e.what());
    }

    const std::string payload_line = read_line(in, "payload length");
    std::size_t count = 0;
    if (std::sscanf(payload_line.c_str(), "PAYLOAD %zu", &count) != 1)
        throw FormatError("malformed payload length line");
    std::vector<unsigned char> bytes(count * 8);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw FormatError("truncated artifact payload");
    if (in.get() != '\n') throw FormatError("malformed artifact payload terminator");

    const std::string checksum_line = read_line(in, "checksum");
    if (checksum_line != "CHECKSUM " + checksum_hex(bytes))
        throw FormatError("artifact checksum mismatch");

    std::vector<double> payload(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t u;
        std::memcpy(&u, bytes.data() + i * 8, 8);
        if constexpr (std::endian::native == std::endian::big) u = std::byteswap(u);
        std::memcpy(&payload[i], &u, 8);
    }
    return {std::move(header), std::move(payload)};
}

void save_model(const ModelGraph& m, const std::string& path) {
    json header;
    header["kind"] = "neural";
    header["input"] = {{"mode", m.uses_embeddings ? "embedding" : "dense"},
                       {"vars", m.input_vars},
                       {"width", m.input_width}};
    if (!m.uses_embeddings) {
        header["input"]["encoding"] = to_string(m.input_encoding.kind);
        header["input"]["buckets"] = m.input_encoding.buckets;
    }
    json embs = json::array();
    for (const auto& e : m.embeddings)
        embs.push_back({{"var", e.var}, {"rows", e.rows}, {"dim", e.dim}});
    header["embeddings"] = embs;
    json trunk = json::array();
    for (const auto& l : m.trunk) trunk.push_back(layer_to_json(l));
    header["trunk"] = trunk;
    header["target"] = {{"var", m.target_var}, {"classes", m.classes}};
    header["schema"] = schema_to_json(m.schema);
    json params = json::array();
    for (const auto& p : m.param_infos) params.push_back({{"name", p.name}, {"shape", p.shape}});
    header["params"] = params;
    header["provenance"] = m.provenance;
    header["init_seed"] = m.init_seed;
    write_artifact(path, header, m.params);
}

ModelGraph load_model_graph(const json& header, const std::vector<double>& payload) {
    try {
        if (header.at("kind").get<std::string>() != "neural")
            throw FormatError("artifact holds a '" + header.at("kind").get<std::string>() +
                              "' model, not a neural one");
        ModelGraph m;
        const auto& input = header.at("input");
        m.uses_embeddings = input.at("mode").get<std::string>() == "embedding";
        m.input_vars = input.at("vars").get<std::vector<std::string>>();
        if (!m.uses_embeddings) {
            m.input_width = input.at("width").get<int>();
            m.input_encoding.kind = encoding_from_string(input.at("encoding").get<std::string>());
            m.input_encoding.buckets = input.at("buckets").get<int>();
        }
        for (const auto& e : header.at("embeddings"))
            m.embeddings.push_back({e.at("var").get<std::string>(), e.at("rows").get<int>(),
                                    e.at("dim").get<int>()});
        for (const auto& l : header.at("trunk")) m.trunk.push_back(layer_from_json(l));
        m.target_var = header.at("target").at("var").get<std::string>();
        m.schema = schema_from_json(header.at("schema"));
        m.provenance = header.value("provenance", json::object());
        m.init_seed = header.value("init_seed", std::uint64_t{0});
        finalize_model(m);
        if (m.params.size() != payload.size())
            throw FormatError("artifact payload holds " + std::to_string(payload.size()) +
                              " values but the architecture needs " +
                              std::to_string(m.params.size()));
        m.params = payload;
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model header: ") + e.what());
    }
}

ModelGraph load_model(const std::string& path) {
    auto [header, payload] = read_artifact(path);
    return load_model_graph(header, payload);
}

} // namespace catcast
