#pragma once

#include "ddae/interconnect.hpp"
#include "ddae/types.hpp"

#include <string>

namespace ddae {

// DDAE document: {"n", "delays", "E", "A" (m+1 row-major matrices), "B", "C"}.
DdaeSystem load_ddae_json(const std::string& path);
void save_ddae_json(const DdaeSystem& sys, const std::string& path);
std::string ddae_to_json(const DdaeSystem& sys);
DdaeSystem ddae_from_json(const std::string& text);

// Plant document: dimensions plus per-channel arrays of {"delay", "matrix"}.
PlantSpec load_plant_json(const std::string& path);

// Controller template: {"nK", channels, optional "mask" (entries "free" or
// {"frozen": v}), optional "p0"}. Without a mask every entry is free and the
// channel matrices provide the initial parameter values.
ControllerTemplate load_template_json(const std::string& path);

// FNV-1a over a canonical text rendering; locks benchmark transcriptions.
unsigned long long ddae_checksum(const DdaeSystem& sys);

}  // namespace ddae
