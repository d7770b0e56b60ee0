#include "appt/tensor_io.hpp"

#include "appt/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

namespace appt {
namespace {

constexpr std::array<char, 4> kMagic{'P', 'J', 'T', '1'};

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw LoadError("tensor container truncated");
    }
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

void write_container(std::ostream& out, std::span<const NamedTensor> tensors) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw Error("tensor name too long: " + t.name.substr(0, 32) + "...");
        }
        if (t.shape.size() > std::numeric_limits<std::uint8_t>::max()) throw Error("tensor rank too large");
        if (numel(t.shape) != t.data.size()) throw DimensionError("tensor " + t.name + " has inconsistent shape");
        put_le<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
        for (auto e : t.shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e));
        for (float f : t.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
    if (!out) throw IoError("failed writing tensor container");
}

std::vector<NamedTensor> read_container(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw LoadError("not a PJT1 tensor container (bad magic bytes)");
    }
    const auto count = get_le<std::uint32_t>(in);
    std::vector<NamedTensor> out;
    for (std::uint32_t k = 0; k < count; ++k) {
        NamedTensor t;
        const auto len = get_le<std::uint16_t>(in);
        t.name.resize(len);
        if (len && !in.read(t.name.data(), len)) throw LoadError("tensor container truncated");
        const auto rank = get_le<std::uint8_t>(in);
        for (std::uint8_t r = 0; r < rank; ++r) t.shape.push_back(get_le<std::uint32_t>(in));
        const auto n = numel(t.shape);
        if (n > (std::size_t{1} << 32)) throw LoadError("tensor " + t.name + " is implausibly large");
        t.data.resize(n);
        for (auto& f : t.data) f = std::bit_cast<float>(get_le<std::uint32_t>(in));
        out.push_back(std::move(t));
    }
    return out;
}

void save_parameters(const std::filesystem::path& path, std::span<const Parameter> params) {
    std::vector<NamedTensor> tensors;
    tensors.reserve(params.size());
    for (const auto& p : params) {
        NamedTensor t{p.name(), p.shape(), {}};
        t.data.assign(p.value().begin(), p.value().end());
        tensors.push_back(std::move(t));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_container(out, tensors);
}

void load_parameters(const std::filesystem::path& path, std::span<Parameter> params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    auto tensors = read_container(in);
    std::map<std::string, NamedTensor*> by_name;
    for (auto& t : tensors) {
        if (!by_name.emplace(t.name, &t).second) throw LoadError("duplicate tensor " + t.name);
    }
    if (by_name.size() != params.size()) {
        throw LoadError("container holds " + std::to_string(by_name.size()) + " tensors, model expects " +
                        std::to_string(params.size()));
    }
    for (auto& p : params) {
        auto it = by_name.find(p.name());
        if (it == by_name.end()) throw LoadError("tensor " + p.name() + " missing from " + path.string());
        const NamedTensor& t = *it->second;
        if (t.shape != p.shape()) {
            throw LoadError("tensor " + p.name() + " has shape " + to_string(t.shape) + ", model expects " +
                            to_string(p.shape()));
        }
        auto dst = p.value();
        for (std::size_t i = 0; i < t.data.size(); ++i) dst[i] = static_cast<real>(t.data[i]);
    }
}

}  // namespace appt
