#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catcast/core.hpp"
#include "catcast/csv.hpp"

namespace catcast {

// Desk-scale stand-in for the scraped corpus. Root variables are uniform;
// the three stage targets follow deterministic mapping tables, each
// corrupted to a uniform draw with probability epsilon. Because the
// mappings are known, the best reachable accuracy of every stage is known
// too (see bayes_accuracy).
struct GeneratorSpec {
    int month_card = 12;
    int notif_card = 8;
    int dist_card = 6;
    int origin_card = 10;
    int product_card = 10;
    int hazard_card = 10;
    int action_card = 8;

    std::vector<int> product_map;  // [origin][month] -> 1..product_card
    std::vector<int> hazard_map;   // [product][origin] -> 1..hazard_card
    std::vector<int> action_map;   // [hazard] -> 1..action_card

    double epsilon = 0.0;
    std::uint64_t seed = 1;
    int year = 2018;          // assigned to the leading rows
    int test_year = 2019;     // assigned to the trailing test_fraction rows
    double test_fraction = 0.0;

    void validate() const;

    int product_of(int origin, int month) const {
        return product_map[static_cast<std::size_t>(origin - 1) * month_card + (month - 1)];
    }
    int hazard_of(int product, int origin) const {
        return hazard_map[static_cast<std::size_t>(product - 1) * origin_card + (origin - 1)];
    }
    int action_of(int hazard) const { return action_map[static_cast<std::size_t>(hazard - 1)]; }
};

// spec with mapping tables drawn deterministically from the seed
GeneratorSpec make_generator_spec(int month_card, int notif_card, int dist_card, int origin_card,
                                  int product_card, int hazard_card, int action_card,
                                  double epsilon, std::uint64_t seed);

GeneratorSpec load_generator_spec(const std::string& path);
void save_generator_spec(const std::string& path, const GeneratorSpec& spec);

Table synth_generate(const GeneratorSpec& spec, std::size_t n_rows);

// re-expands a synthetic table to the CSV layout ingest consumes
// (DATE_CASE becomes dd/mm/yyyy)
RawTable synth_to_csv(const Table& table);

// (1-eps) + eps/K for the stage's target cardinality: the accuracy of the
// optimal predictor given the target's true parents
double bayes_accuracy(const GeneratorSpec& spec, int stage);

} // namespace catcast
