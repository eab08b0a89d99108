#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "catcast/errors.hpp"

namespace catcast {

constexpr int kUnkIndex = 0;
inline const std::string kUnkName = "<UNK>";
inline const std::string kBlank = "<blank>";

// Ordered set of category strings. Index 0 is reserved for values unseen
// while fitting; known categories get 1..n in first-appearance order.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> entries);

    // 1-based index of a known value, 0 for anything unseen.
    int lookup(const std::string& value) const {
        auto it = index_.find(value);
        return it == index_.end() ? kUnkIndex : it->second;
    }

    const std::string& decode(int index) const {
        if (index == kUnkIndex) return kUnkName;
        if (index < 0 || static_cast<std::size_t>(index) > entries_.size())
            throw IndexError("vocabulary index " + std::to_string(index) + " out of range");
        return entries_[static_cast<std::size_t>(index) - 1];
    }

    int cardinality() const { return static_cast<int>(entries_.size()); }
    const std::vector<std::string>& entries() const { return entries_; }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, int> index_;
};

// first-appearance fit; the column must already be normalized by ingest
Vocabulary fit_vocabulary(const std::vector<std::string>& raw_column);

enum class VarRole { input, target, ignored };

const char* to_string(VarRole role);
VarRole var_role_from_string(const std::string& s);

struct VariableSpec {
    std::string name;
    VarRole role = VarRole::input;
    Vocabulary vocab;
};

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<VariableSpec> vars);

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find(const std::string& name) const;
    std::size_t require(const std::string& name) const;

    const VariableSpec& var(std::size_t i) const { return vars_[i]; }
    const VariableSpec& var(const std::string& name) const { return vars_[require(name)]; }
    std::size_t size() const { return vars_.size(); }
    const std::vector<VariableSpec>& vars() const { return vars_; }

private:
    std::vector<VariableSpec> vars_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

// per-stage wiring of the three-step workflow: each stage consumes the
// previous stage's inputs plus its prediction target
struct StageVars {
    std::vector<std::string> inputs;
    std::string target;
};

const StageVars& stage_variables(int stage_id);

enum class Provenance { real, synthetic };

// Immutable row store of vocabulary indices, one column per schema
// variable, plus a per-row year used for the held-out-year split.
struct Table {
    Schema schema;
    std::vector<std::int32_t> cells;  // row-major, n_rows × schema.size()
    std::vector<std::int32_t> years;
    Provenance provenance = Provenance::real;

    std::size_t n_rows() const { return schema.size() == 0 ? 0 : cells.size() / schema.size(); }
    std::int32_t at(std::size_t row, std::size_t col) const {
        return cells[row * schema.size() + col];
    }
    void validate() const;  // cell range + column consistency
};

} // namespace catcast
