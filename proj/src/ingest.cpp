#include "catcast/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "catcast/rng.hpp"

namespace catcast {

using json = nlohmann::json;

const std::vector<std::string>& known_columns() {
    static const std::vector<std::string> cols = {
        "NUMBER", "CLASSIFICATION", "DATE_CASE", "REF", "NOTIFICATION_COUNTRY",
        "SUBJECT", "PRODUCT_CATEGORY", "TYPE", "RISK_DECISION", "ACTION_TAKEN",
        "DISTRIBUTION_STATUS", "PRODUCT", "HAZARD", "HAZARD_CATEGORY",
        "COUNTRY_ORIGIN", "COUNTRY_DESTINATION", "COUNTRY_DISTRIBUTION"};
    return cols;
}

VarRole role_of_column(const std::string& name) {
    if (name == "SUBJECT" || name == "PRODUCT" || name == "HAZARD") return VarRole::ignored;
    if (name == "PRODUCT_CATEGORY" || name == "HAZARD_CATEGORY" || name == "ACTION_TAKEN")
        return VarRole::target;
    return VarRole::input;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool parse_int(const std::string& s, int& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc{} && p == e;
}

// strict dd/mm/yyyy
bool parse_date(const std::string& s, int& month, int& year) {
    const std::size_t s1 = s.find('/');
    if (s1 == std::string::npos) return false;
    const std::size_t s2 = s.find('/', s1 + 1);
    if (s2 == std::string::npos || s.find('/', s2 + 1) != std::string::npos) return false;
    int day = 0;
    if (!parse_int(s.substr(0, s1), day)) return false;
    if (!parse_int(s.substr(s1 + 1, s2 - s1 - 1), month)) return false;
    if (!parse_int(s.substr(s2 + 1), year)) return false;
    return day >= 1 && day <= 31 && month >= 1 && month <= 12 && year >= 1000 && year <= 9999;
}

bool is_month_value(const std::string& s, int& month) {
    return parse_int(s, month) && month >= 1 && month <= 12;
}

std::string apply_renames(std::string value, const std::map<std::string, std::string>* col_map,
                          const std::map<std::string, std::string>* star_map) {
    // chase chains to a fixpoint so the pass stays idempotent
    const std::size_t cap = (col_map ? col_map->size() : 0) + (star_map ? star_map->size() : 0) + 1;
    for (std::size_t i = 0; i < cap; ++i) {
        const std::map<std::string, std::string>* maps[2] = {col_map, star_map};
        bool changed = false;
        for (const auto* m : maps) {
            if (!m) continue;
            auto it = m->find(value);
            if (it != m->end() && it->second != value) {
                value = it->second;
                changed = true;
                break;
            }
        }
        if (!changed) return value;
    }
    throw ConfigError("rename map contains a cycle involving '" + value + "'");
}

} // namespace

std::string normalize_category(const std::string& raw) {
    std::string v = to_lower(trim(raw));
    if (v.empty() || v == "nan") return kBlank;
    return v;
}

RenameMap load_rename_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open rename map '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("rename map '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw FormatError("rename map must be a JSON object");
    RenameMap out;
    for (auto& [col, entries] : j.items()) {
        if (!entries.is_object()) throw FormatError("rename entries for '" + col + "' must be an object");
        auto& m = out[col == "*" ? col : to_upper(trim(col))];
        for (auto& [old_v, new_v] : entries.items())
            m[normalize_category(old_v)] = normalize_category(new_v.get<std::string>());
    }
    return out;
}

Preprocessed preprocess(const RawTable& raw, const RenameMap& renames) {
    // header canonicalization; NUMBER and REF are tolerated but dropped
    static const std::unordered_set<std::string> known(known_columns().begin(),
                                                       known_columns().end());
    std::vector<std::string> names;
    std::vector<std::size_t> keep;
    bool had_year_col = false;
    std::size_t in_year_col = RawTable::npos;
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        const std::string name = to_upper(trim(raw.header[c]));
        if (name == "NUMBER" || name == "REF") continue;
        if (name == kYearCol) {
            had_year_col = true;
            in_year_col = c;
            continue;
        }
        if (!known.count(name)) throw FormatError("unknown column '" + raw.header[c] + "'");
        if (std::find(names.begin(), names.end(), name) != names.end())
            throw FormatError("duplicate column '" + name + "'");
        names.push_back(name);
        keep.push_back(c);
    }
    if (names.empty()) throw FormatError("no usable columns in header");

    Preprocessed out;
    out.table.header = names;
    const std::size_t date_col = [&] {
        auto it = std::find(names.begin(), names.end(), kDateCol);
        return it == names.end() ? RawTable::npos
                                 : static_cast<std::size_t>(it - names.begin());
    }();
    const bool emit_year = date_col != RawTable::npos;
    if (emit_year) out.table.header.push_back(kYearCol);

    std::unordered_set<std::string> seen_rows;
    std::vector<std::string> row(names.size());
    for (std::size_t r = 0; r < raw.n_rows(); ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) {
            std::string v = normalize_category(raw.at(r, keep[c]));
            auto col_it = renames.find(names[c]);
            auto star_it = renames.find("*");
            v = apply_renames(std::move(v),
                              col_it == renames.end() ? nullptr : &col_it->second,
                              star_it == renames.end() ? nullptr : &star_it->second);
            row[c] = std::move(v);
        }

        // month/year extraction, with a passthrough for already-processed files
        int year = 0;
        if (emit_year) {
            int month = 0;
            const std::string& d = row[date_col];
            if (parse_date(d, month, year)) {
                // ok
            } else if (had_year_col && is_month_value(d, month) &&
                       parse_int(normalize_category(raw.at(r, in_year_col)), year)) {
                // already extracted
            } else {
                ++out.dropped_bad_dates;
                continue;
            }
            row[date_col] = std::to_string(month);
        }

        // dedupe on the final representation so a second pass is a no-op
        std::string key;
        for (const auto& v : row) {
            key += v;
            key += '\x1f';
        }
        if (emit_year) key += std::to_string(year);
        if (!seen_rows.insert(key).second) {
            ++out.removed_duplicates;
            continue;
        }

        for (const auto& v : row) out.table.cells.push_back(v);
        if (emit_year) out.table.cells.push_back(std::to_string(year));
    }
    return out;
}

std::vector<std::int32_t> table_years(const RawTable& processed) {
    const std::size_t yc = processed.col(kYearCol);
    if (yc == RawTable::npos) throw DataError("table has no YEAR column; dates were never parsed");
    std::vector<std::int32_t> years(processed.n_rows());
    for (std::size_t r = 0; r < processed.n_rows(); ++r) {
        int y = 0;
        if (!parse_int(processed.at(r, yc), y))
            throw FormatError("bad YEAR value '" + processed.at(r, yc) + "' at row " +
                              std::to_string(r + 2));
        years[r] = y;
    }
    return years;
}

RawTable filter_years(const RawTable& processed, int min_year, int max_year) {
    if (min_year > max_year)
        throw DataError("inverted year range [" + std::to_string(min_year) + ", " +
                        std::to_string(max_year) + "]");
    const auto years = table_years(processed);
    RawTable out;
    out.header = processed.header;
    for (std::size_t r = 0; r < processed.n_rows(); ++r) {
        if (years[r] < min_year || years[r] > max_year) continue;
        for (std::size_t c = 0; c < processed.n_cols(); ++c)
            out.cells.push_back(processed.at(r, c));
    }
    if (out.n_rows() == 0)
        throw DataError("no rows left after filtering to [" + std::to_string(min_year) + ", " +
                        std::to_string(max_year) + "]");
    return out;
}

Table build_table(const RawTable& processed, int fit_exclude_year) {
    std::vector<std::int32_t> years;
    if (processed.col(kYearCol) != RawTable::npos) {
        years = table_years(processed);
    } else {
        if (fit_exclude_year >= 0) throw DataError("cannot exclude a year: no YEAR column");
        years.assign(processed.n_rows(), 0);
    }

    std::vector<std::size_t> model_cols;
    std::vector<VariableSpec> vars;
    for (std::size_t c = 0; c < processed.n_cols(); ++c) {
        const std::string& name = processed.header[c];
        if (name == kYearCol) continue;
        const VarRole role = role_of_column(name);
        if (role == VarRole::ignored) continue;
        model_cols.push_back(c);
        vars.push_back(VariableSpec{name, role, {}});
    }

    for (std::size_t i = 0; i < model_cols.size(); ++i) {
        std::vector<std::string> column;
        column.reserve(processed.n_rows());
        for (std::size_t r = 0; r < processed.n_rows(); ++r) {
            if (fit_exclude_year >= 0 && years[r] == fit_exclude_year) continue;
            column.push_back(processed.at(r, model_cols[i]));
        }
        if (column.empty())
            throw SchemaError("column '" + vars[i].name + "' has no rows to fit on");
        vars[i].vocab = fit_vocabulary(column);
    }

    Table t;
    t.schema = Schema(std::move(vars));
    t.years = years;
    t.cells.reserve(processed.n_rows() * model_cols.size());
    for (std::size_t r = 0; r < processed.n_rows(); ++r)
        for (std::size_t i = 0; i < model_cols.size(); ++i)
            t.cells.push_back(t.schema.var(i).vocab.lookup(processed.at(r, model_cols[i])));
    t.provenance = Provenance::real;
    return t;
}

SplitPlan make_split(const Table& table, int test_year, std::uint64_t seed) {
    SplitPlan plan;
    plan.seed = seed;
    plan.test_year = test_year;
    std::vector<std::size_t> rest;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        if (table.years[r] == test_year) plan.test.push_back(r);
        else rest.push_back(r);
    }
    if (plan.test.empty())
        throw DataError("no rows with test year " + std::to_string(test_year));
    if (rest.empty())
        throw DataError("every row has the test year; nothing left to train on");

    Rng rng(mix_seed(seed, "split"));
    rng.shuffle(rest);
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(rest.size())));
    plan.train.assign(rest.begin(), rest.begin() + n_train);
    plan.validation.assign(rest.begin() + n_train, rest.end());
    std::sort(plan.train.begin(), plan.train.end());
    std::sort(plan.validation.begin(), plan.validation.end());
    std::sort(plan.test.begin(), plan.test.end());
    return plan;
}

FoldPlan make_folds(const std::vector<std::size_t>& train_indices, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("k-fold cross-validation needs k >= 2");
    if (static_cast<std::size_t>(k) > train_indices.size())
        throw DataError("k=" + std::to_string(k) + " exceeds the " +
                        std::to_string(train_indices.size()) + " training rows");
    std::vector<std::size_t> order = train_indices;
    Rng rng(mix_seed(seed, "folds"));
    rng.shuffle(order);
    FoldPlan plan;
    plan.k = k;
    plan.folds.resize(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < order.size(); ++i)
        plan.folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
    return plan;
}

FoldPlan make_folds(const SplitPlan& split, int k, std::uint64_t seed) {
    return make_folds(split.train, k, seed);
}

void save_split(const std::string& path, const SplitPlan& split, const FoldPlan& folds) {
    json j;
    j["seed"] = split.seed;
    j["test_year"] = split.test_year;
    j["train"] = split.train;
    j["validation"] = split.validation;
    j["test"] = split.test;
    j["k"] = folds.k;
    j["folds"] = folds.folds;
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write split plan '" + path + "'");
    out << j.dump(2) << '\n';
}

std::pair<SplitPlan, FoldPlan> load_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open split plan '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("split plan '" + path + "': " + e.what());
    }
    SplitPlan split;
    FoldPlan folds;
    try {
        split.seed = j.at("seed").get<std::uint64_t>();
        split.test_year = j.at("test_year").get<int>();
        split.train = j.at("train").get<std::vector<std::size_t>>();
        split.validation = j.at("validation").get<std::vector<std::size_t>>();
        split.test = j.at("test").get<std::vector<std::size_t>>();
        folds.k = j.at("k").get<int>();
        folds.folds = j.at("folds").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& e) {
        throw FormatError("split plan '" + path + "': " + e.what());
    }
    return {split, folds};
}

} // namespace catcast
