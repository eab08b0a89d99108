#include "catcast/synth.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "catcast/ingest.hpp"
#include "catcast/rng.hpp"

namespace catcast {

using json = nlohmann::json;

namespace {

const std::vector<std::pair<std::string, std::string>>& synth_vars() {
    // column name, category prefix; DATE_CASE categories are bare months
    static const std::vector<std::pair<std::string, std::string>> vars = {
        {"DATE_CASE", ""},          {"NOTIFICATION_COUNTRY", "notif"},
        {"DISTRIBUTION_STATUS", "dist"}, {"COUNTRY_ORIGIN", "origin"},
        {"PRODUCT_CATEGORY", "product"}, {"HAZARD_CATEGORY", "hazard"},
        {"ACTION_TAKEN", "action"}};
    return vars;
}

Vocabulary synth_vocab(const std::string& prefix, int card) {
    std::vector<std::string> entries;
    entries.reserve(static_cast<std::size_t>(card));
    for (int i = 1; i <= card; ++i)
        entries.push_back(prefix.empty() ? std::to_string(i) : prefix + "_" + std::to_string(i));
    return Vocabulary(std::move(entries));
}

void check_map(const std::vector<int>& map, std::size_t expected, int card, const char* name) {
    if (map.size() != expected)
        throw ConfigError(std::string(name) + " mapping has wrong size");
    for (int v : map)
        if (v < 1 || v > card)
            throw ConfigError(std::string(name) + " mapping points outside the target vocabulary");
}

} // namespace

void GeneratorSpec::validate() const {
    const int cards[] = {month_card,   notif_card,  dist_card, origin_card,
                         product_card, hazard_card, action_card};
    for (int c : cards)
        if (c < 1) throw ConfigError("every cardinality must be >= 1");
    if (month_card > 12) throw ConfigError("DATE_CASE cardinality cannot exceed 12 months");
    if (epsilon < 0.0 || epsilon >= 1.0) throw ConfigError("epsilon must be in [0, 1)");
    if (test_fraction < 0.0 || test_fraction > 1.0)
        throw ConfigError("test_fraction must be in [0, 1]");
    check_map(product_map, static_cast<std::size_t>(origin_card) * month_card, product_card,
              "product");
    check_map(hazard_map, static_cast<std::size_t>(product_card) * origin_card, hazard_card,
              "hazard");
    check_map(action_map, static_cast<std::size_t>(hazard_card), action_card, "action");
}

GeneratorSpec make_generator_spec(int month_card, int notif_card, int dist_card, int origin_card,
                                  int product_card, int hazard_card, int action_card,
                                  double epsilon, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.month_card = month_card;
    spec.notif_card = notif_card;
    spec.dist_card = dist_card;
    spec.origin_card = origin_card;
    spec.product_card = product_card;
    spec.hazard_card = hazard_card;
    spec.action_card = action_card;
    spec.epsilon = epsilon;
    spec.seed = seed;

    Rng rng(mix_seed(seed, "maps"));
    spec.product_map.resize(static_cast<std::size_t>(origin_card) * month_card);
    for (auto& v : spec.product_map) v = 1 + static_cast<int>(rng.below(product_card));
    spec.hazard_map.resize(static_cast<std::size_t>(product_card) * origin_card);
    for (auto& v : spec.hazard_map) v = 1 + static_cast<int>(rng.below(hazard_card));
    spec.action_map.resize(static_cast<std::size_t>(hazard_card));
    for (auto& v : spec.action_map) v = 1 + static_cast<int>(rng.below(action_card));
    spec.validate();
    return spec;
}

Table synth_generate(const GeneratorSpec& spec, std::size_t n_rows) {
    spec.validate();

    std::vector<VariableSpec> vars;
    const int cards[] = {spec.month_card, spec.notif_card,   spec.dist_card, spec.origin_card,
                         spec.product_card, spec.hazard_card, spec.action_card};
    const auto& defs = synth_vars();
    for (std::size_t i = 0; i < defs.size(); ++i)
        vars.push_back(VariableSpec{defs[i].first, role_of_column(defs[i].first),
                                    synth_vocab(defs[i].second, cards[i])});

    Table t;
    t.schema = Schema(std::move(vars));
    t.provenance = Provenance::synthetic;
    t.cells.reserve(n_rows * defs.size());
    t.years.reserve(n_rows);

    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(n_rows)));
    const std::size_t first_test_row = n_rows - n_test;

    Rng rng(mix_seed(spec.seed, "rows"));
    auto noisy = [&](int mapped, int card) {
        if (spec.epsilon > 0.0 && rng.uniform01() < spec.epsilon)
            return 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(card)));
        return mapped;
    };

    for (std::size_t r = 0; r < n_rows; ++r) {
        const int month = 1 + static_cast<int>(rng.below(spec.month_card));
        const int notif = 1 + static_cast<int>(rng.below(spec.notif_card));
        const int dist = 1 + static_cast<int>(rng.below(spec.dist_card));
        const int origin = 1 + static_cast<int>(rng.below(spec.origin_card));
        const int product = noisy(spec.product_of(origin, month), spec.product_card);
        const int hazard = noisy(spec.hazard_of(product, origin), spec.hazard_card);
        const int action = noisy(spec.action_of(hazard), spec.action_card);
        const std::int32_t row[] = {month, notif, dist, origin, product, hazard, action};
        t.cells.insert(t.cells.end(), std::begin(row), std::end(row));
        t.years.push_back(r < first_test_row ? spec.year : spec.test_year);
    }
    return t;
}

RawTable synth_to_csv(const Table& table) {
    RawTable out;
    const std::size_t date_col = table.schema.require(kDateCol);
    for (const auto& v : table.schema.vars()) out.header.push_back(v.name);
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.schema.size(); ++c) {
            const std::string& value = table.schema.var(c).vocab.decode(table.at(r, c));
            if (c == date_col)
                out.cells.push_back("15/" + value + "/" + std::to_string(table.years[r]));
            else
                out.cells.push_back(value);
        }
    }
    return out;
}

double bayes_accuracy(const GeneratorSpec& spec, int stage) {
    int k = 0;
    switch (stage) {
        case 1: k = spec.product_card; break;
        case 2: k = spec.hazard_card; break;
        case 3: k = spec.action_card; break;
        default: throw ConfigError("stage must be 1, 2 or 3");
    }
    return (1.0 - spec.epsilon) + spec.epsilon / static_cast<double>(k);
}

GeneratorSpec load_generator_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open generator spec '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("generator spec '" + path + "': " + e.what());
    }
    try {
        const auto& cards = j.at("cardinalities");
        GeneratorSpec spec = make_generator_spec(
            cards.at("DATE_CASE").get<int>(), cards.at("NOTIFICATION_COUNTRY").get<int>(),
            cards.at("DISTRIBUTION_STATUS").get<int>(), cards.at("COUNTRY_ORIGIN").get<int>(),
            cards.at("PRODUCT_CATEGORY").get<int>(), cards.at("HAZARD_CATEGORY").get<int>(),
            cards.at("ACTION_TAKEN").get<int>(), j.at("epsilon").get<double>(),
            j.at("seed").get<std::uint64_t>());
        if (j.contains("mappings") && j["mappings"].is_object()) {
            const auto& m = j["mappings"];
            spec.product_map = m.at("product").get<std::vector<int>>();
            spec.hazard_map = m.at("hazard").get<std::vector<int>>();
            spec.action_map = m.at("action").get<std::vector<int>>();
        }
        if (j.contains("year")) spec.year = j["year"].get<int>();
        if (j.contains("test_year")) spec.test_year = j["test_year"].get<int>();
        if (j.contains("test_fraction")) spec.test_fraction = j["test_fraction"].get<double>();
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw FormatError("generator spec '" + path + "': " + e.what());
    }
}

void save_generator_spec(const std::string& path, const GeneratorSpec& spec) {
    json j;
    j["seed"] = spec.seed;
    j["epsilon"] = spec.epsilon;
    j["year"] = spec.year;
    j["test_year"] = spec.test_year;
    j["test_fraction"] = spec.test_fraction;
    j["cardinalities"] = {{"DATE_CASE", spec.month_card},
                          {"NOTIFICATION_COUNTRY", spec.notif_card},
                          {"DISTRIBUTION_STATUS", spec.dist_card},
                          {"COUNTRY_ORIGIN", spec.origin_card},
                          {"PRODUCT_CATEGORY", spec.product_card},
                          {"HAZARD_CATEGORY", spec.hazard_card},
                          {"ACTION_TAKEN", spec.action_card}};
    j["mappings"] = {{"product", spec.product_map},
                     {"hazard", spec.hazard_map},
                     {"action", spec.action_map}};
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write generator spec '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace catcast
