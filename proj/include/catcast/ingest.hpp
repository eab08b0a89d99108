#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catcast/core.hpp"
#include "catcast/csv.hpp"

namespace catcast {

// The 17 feature columns a raw dump may carry (synthetic files use a subset).
const std::vector<std::string>& known_columns();

// Role assignment by column name: free-text columns are carried but never
// modeled, the three stage outputs are targets, the rest are inputs.
VarRole role_of_column(const std::string& canonical_name);

inline const std::string kDateCol = "DATE_CASE";
inline const std::string kYearCol = "YEAR";

// old -> new category fixes, applied per column ("*" = every column)
using RenameMap = std::map<std::string, std::map<std::string, std::string>>;

RenameMap load_rename_map(const std::string& path);

struct Preprocessed {
    RawTable table;                    // normalized cells; DATE_CASE holds the
                                       // extracted month, YEAR appended
    std::size_t removed_duplicates = 0;
    std::size_t dropped_bad_dates = 0;
};

// trim + ASCII case-fold; ""/"nan" become the blank sentinel
std::string normalize_category(const std::string& raw);

// Cleaning pipeline: header canonicalization (NUMBER/REF dropped), cell
// normalization and blank replacement, category renaming, exact-duplicate
// removal, date -> (month, year) extraction. Idempotent.
Preprocessed preprocess(const RawTable& raw, const RenameMap& renames = {});

// years as stored in the YEAR column; DataError if the column is missing
std::vector<std::int32_t> table_years(const RawTable& processed);

RawTable filter_years(const RawTable& processed, int min_year, int max_year);

// Fit vocabularies (first appearance) over rows whose year differs from
// fit_exclude_year, then index every row; unseen values map to UNK.
// Pass -1 to fit on all rows. Ignored-role columns are not modeled.
Table build_table(const RawTable& processed, int fit_exclude_year = -1);

struct SplitPlan {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
    int test_year = 0;
};

// test = every row of test_year; the rest is shuffled and split 80/20
SplitPlan make_split(const Table& table, int test_year, std::uint64_t seed);

struct FoldPlan {
    int k = 0;
    std::vector<std::vector<std::size_t>> folds;
};

// seeded shuffle of the training indices, then round-robin assignment
FoldPlan make_folds(const SplitPlan& split, int k, std::uint64_t seed);
FoldPlan make_folds(const std::vector<std::size_t>& train_indices, int k, std::uint64_t seed);

void save_split(const std::string& path, const SplitPlan& split, const FoldPlan& folds);
std::pair<SplitPlan, FoldPlan> load_split(const std::string& path);

} // namespace catcast
