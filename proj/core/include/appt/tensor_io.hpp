#pragma once

#include "appt/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace appt {

// PJT1 tensor container. Layout, all integers little-endian:
//   "PJT1" | u32 count | count × (u16 name_len | name | u8 rank | rank × u32 extent | f32 data...)
struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<float> data;
};

void write_container(std::ostream& out, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> read_container(std::istream& in);

/// Write every parameter value as 32-bit floats under its own name.
void save_parameters(const std::filesystem::path& path, std::span<const Parameter> params);

/// Fill `params` from a container. Every parameter must be present with the
/// identical shape and the container must hold nothing else.
void load_parameters(const std::filesystem::path& path, std::span<Parameter> params);

}  // namespace appt
