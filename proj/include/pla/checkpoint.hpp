#pragma once

#include <filesystem>
#include <string>

#include "pla/pla_model.hpp"
#include "pla/ptr.hpp"

namespace pla {

// Versioned JSON checkpoints. Doubles are written in shortest round-trip
// form, so save -> load -> save is byte-identical and parameters survive
// bit-exactly. Loading verifies the embedded config hash when `expect_hash`
// is non-empty and throws Error("StaleCheckpoint") on mismatch.
void save_ptr_checkpoint(const std::filesystem::path& path, const PtrModel& model,
                         const std::string& config_hash);
PtrModel load_ptr_checkpoint(const std::filesystem::path& path,
                             const std::string& expect_hash = {});

void save_pla_checkpoint(const std::filesystem::path& path, const PlaModel& model,
                         const std::string& config_hash);
PlaModel load_pla_checkpoint(const std::filesystem::path& path,
                             const std::string& expect_hash = {});

}  // namespace pla
