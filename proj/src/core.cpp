#include "catcast/core.hpp"

namespace catcast {

Vocabulary::Vocabulary(std::vector<std::string> entries) : entries_(std::move(entries)) {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto [it, inserted] = index_.emplace(entries_[i], static_cast<int>(i) + 1);
        (void)it;
        if (!inserted)
            throw SchemaError("duplicate vocabulary entry '" + entries_[i] + "'");
    }
}

Vocabulary fit_vocabulary(const std::vector<std::string>& raw_column) {
    if (raw_column.empty()) throw SchemaError("cannot fit a vocabulary on an empty column");
    std::vector<std::string> entries;
    std::unordered_map<std::string, int> seen;
    for (const auto& value : raw_column) {
        if (seen.emplace(value, 1).second) entries.push_back(value);
    }
    return Vocabulary(std::move(entries));
}

const char* to_string(VarRole role) {
    switch (role) {
        case VarRole::input: return "input";
        case VarRole::target: return "target";
        case VarRole::ignored: return "ignored";
    }
    return "input";
}

VarRole var_role_from_string(const std::string& s) {
    if (s == "input") return VarRole::input;
    if (s == "target") return VarRole::target;
    if (s == "ignored") return VarRole::ignored;
    throw SchemaError("unknown variable role '" + s + "'");
}

Schema::Schema(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (!by_name_.emplace(vars_[i].name, i).second)
            throw SchemaError("duplicate variable name '" + vars_[i].name + "'");
    }
}

std::size_t Schema::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? npos : it->second;
}

std::size_t Schema::require(const std::string& name) const {
    const std::size_t i = find(name);
    if (i == npos) throw SchemaError("schema has no variable '" + name + "'");
    return i;
}

const StageVars& stage_variables(int stage_id) {
    static const StageVars stage1{
        {"DATE_CASE", "NOTIFICATION_COUNTRY", "DISTRIBUTION_STATUS", "COUNTRY_ORIGIN"},
        "PRODUCT_CATEGORY"};
    static const StageVars stage2{
        {"DATE_CASE", "NOTIFICATION_COUNTRY", "DISTRIBUTION_STATUS", "COUNTRY_ORIGIN",
         "PRODUCT_CATEGORY"},
        "HAZARD_CATEGORY"};
    static const StageVars stage3{
        {"DATE_CASE", "NOTIFICATION_COUNTRY", "DISTRIBUTION_STATUS", "COUNTRY_ORIGIN",
         "PRODUCT_CATEGORY", "HAZARD_CATEGORY"},
        "ACTION_TAKEN"};
    switch (stage_id) {
        case 1: return stage1;
        case 2: return stage2;
        case 3: return stage3;
    }
    throw ConfigError("stage must be 1, 2 or 3, got " + std::to_string(stage_id));
}

void Table::validate() const {
    const std::size_t w = schema.size();
    if (w == 0) {
        if (!cells.empty()) throw SchemaError("table has cells but no schema");
        return;
    }
    if (cells.size() % w != 0) throw SchemaError("table cell count is not a multiple of width");
    const std::size_t n = cells.size() / w;
    if (years.size() != n) throw SchemaError("table year column length mismatch");
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const std::int32_t v = at(r, c);
            if (v < 0 || v > schema.var(c).vocab.cardinality())
                throw SchemaError("cell index out of vocabulary range in column '" +
                                  schema.var(c).name + "'");
        }
    }
}

} // namespace catcast
