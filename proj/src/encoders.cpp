#include "catcast/encoders.hpp"

#include <bit>

#include "catcast/rng.hpp"

namespace catcast {

const char* to_string(EncodingKind kind) {
    switch (kind) {
        case EncodingKind::integer: return "integer";
        case EncodingKind::binary: return "binary";
        case EncodingKind::hashing: return "hashing";
        case EncodingKind::one_hot: return "one-hot";
        case EncodingKind::embedding: return "embedding";
    }
    return "one-hot";
}

EncodingKind encoding_from_string(const std::string& s) {
    if (s == "integer") return EncodingKind::integer;
    if (s == "binary") return EncodingKind::binary;
    if (s == "hashing") return EncodingKind::hashing;
    if (s == "one-hot" || s == "one_hot" || s == "onehot") return EncodingKind::one_hot;
    if (s == "embedding") return EncodingKind::embedding;
    throw ConfigError("unknown encoding '" + s + "'");
}

void EncodingScheme::validate() const {
    if (kind == EncodingKind::hashing && buckets < 2)
        throw ConfigError("hashing needs at least 2 buckets");
}

double integer_encode(int index, int cardinality) {
    if (index < 0 || index > cardinality)
        throw EncodeError("integer code " + std::to_string(index) + " outside 0.." +
                          std::to_string(cardinality));
    return static_cast<double>(index);
}

int binary_width(int cardinality) {
    if (cardinality < 1) throw EncodeError("binary width needs a cardinality >= 1");
    // ceil(log2(n+1)) computed in integers
    const unsigned n = static_cast<unsigned>(cardinality);
    return static_cast<int>(std::bit_width(n));
}

std::vector<double> binary_encode(int index, int width) {
    if (width < 1 || width > 62) throw EncodeError("binary width out of range");
    if (index < 0 || static_cast<long long>(index) >= (1LL << width))
        throw EncodeError("code " + std::to_string(index) + " does not fit in " +
                          std::to_string(width) + " bits");
    std::vector<double> bits(static_cast<std::size_t>(width), 0.0);
    for (int b = 0; b < width; ++b)
        bits[static_cast<std::size_t>(width - 1 - b)] = static_cast<double>((index >> b) & 1);
    return bits;
}

int hash_encode(const std::string& value, int buckets) {
    if (buckets < 2) throw EncodeError("hashing needs at least 2 buckets");
    return static_cast<int>(fnv1a64(value) % static_cast<std::uint64_t>(buckets));
}

std::vector<double> one_hot(int index, int cardinality) {
    if (index < 0 || index > cardinality)
        throw EncodeError("one-hot index " + std::to_string(index) + " outside 0.." +
                          std::to_string(cardinality));
    std::vector<double> v(static_cast<std::size_t>(cardinality) + 1, 0.0);
    v[static_cast<std::size_t>(index)] = 1.0;
    return v;
}

int encoded_width(const EncodingScheme& scheme, int cardinality) {
    switch (scheme.kind) {
        case EncodingKind::integer: return 1;
        case EncodingKind::binary: return binary_width(cardinality);
        case EncodingKind::hashing: return scheme.buckets;
        case EncodingKind::one_hot: return cardinality + 1;
        case EncodingKind::embedding:
            throw ConfigError("embedding is not a matrix encoding; use a neural model");
    }
    return 0;
}

EncodedMatrix encode_rows(const Table& table, const std::vector<std::size_t>& rows,
                          const EncodingScheme& scheme,
                          const std::vector<std::string>& input_variables) {
    scheme.validate();
    std::vector<std::size_t> cols;
    std::vector<int> widths;
    std::size_t total = 0;
    for (const auto& name : input_variables) {
        const std::size_t c = table.schema.require(name);
        cols.push_back(c);
        const int w = encoded_width(scheme, table.schema.var(c).vocab.cardinality());
        widths.push_back(w);
        total += static_cast<std::size_t>(w);
    }

    EncodedMatrix out;
    out.values = Mat(rows.size(), total);
    for (std::size_t v = 0; v < cols.size(); ++v)
        for (int i = 0; i < widths[v]; ++i)
            out.column_names.push_back(input_variables[v] + "-" + std::to_string(i));

    for (std::size_t r = 0; r < rows.size(); ++r) {
        double* dst = out.values[r];
        std::size_t off = 0;
        for (std::size_t v = 0; v < cols.size(); ++v) {
            const Vocabulary& vocab = table.schema.var(cols[v]).vocab;
            const int idx = table.at(rows[r], cols[v]);
            switch (scheme.kind) {
                case EncodingKind::integer:
                    dst[off] = integer_encode(idx, vocab.cardinality());
                    break;
                case EncodingKind::binary: {
                    const auto bits = binary_encode(idx, widths[v]);
                    for (int i = 0; i < widths[v]; ++i) dst[off + static_cast<std::size_t>(i)] = bits[i];
                    break;
                }
                case EncodingKind::hashing: {
                    const int bucket = hash_encode(vocab.decode(idx), scheme.buckets);
                    dst[off + static_cast<std::size_t>(bucket)] = 1.0;
                    break;
                }
                case EncodingKind::one_hot:
                    dst[off + static_cast<std::size_t>(idx)] = 1.0;
                    break;
                case EncodingKind::embedding:
                    throw ConfigError("embedding is not a matrix encoding");
            }
            off += static_cast<std::size_t>(widths[v]);
        }
    }
    return out;
}

EncodedMatrix encode_table(const Table& table, const EncodingScheme& scheme,
                           const std::vector<std::string>& input_variables) {
    std::vector<std::size_t> all(table.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return encode_rows(table, all, scheme, input_variables);
}

} // namespace catcast
