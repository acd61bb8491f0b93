#pragma once

#include "ddae/interconnect.hpp"
#include "ddae/levelset.hpp"

#include <string>
#include <vector>

namespace ddae {

// One published controller row for a benchmark plant.
struct BenchRow {
    std::string label;
    ControllerTemplate ctrl;
    double published = 0.0;
};

// A plant transcribed from the literature collection, with the published
// closed-loop strong norms to compare against.
struct BenchCase {
    std::string name;
    std::string description;
    PlantSpec plant;
    std::vector<BenchRow> rows;
    LevelSetOptions opts;
    std::string note;  // transcription caveats, printed by the bench command
    // alternative plant readings where the source data is ambiguous
    std::vector<std::pair<std::string, PlantSpec>> variants;
};

const std::vector<BenchCase>& bench_registry();
const BenchCase* find_bench(const std::string& name);

}  // namespace ddae
