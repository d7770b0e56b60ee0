#pragma once

#include "appt/patch.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace appt {

// JSON Lines, one object per patch:
//   {"id": string, "diff": string, "label": "correct" | "overfitting" | null}
// Unknown keys are ignored. Ids must be unique.

std::vector<RawPatch> read_dataset(std::istream& in);
std::vector<RawPatch> read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const std::vector<RawPatch>& patches);
void write_dataset(const std::filesystem::path& path, const std::vector<RawPatch>& patches);

}  // namespace appt
