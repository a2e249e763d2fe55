#include "uavrl/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace uavrl {

namespace {

constexpr char kMagic[8] = {'M', 'L', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::ifstream& in) {
    char bytes[4];
    if (!in.read(bytes, 4)) throw std::runtime_error("checkpoint: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpArchitecture& arch,
                     const ParamVector& params) {
    arch.validate();
    if (params.size() != arch.param_count())
        throw std::invalid_argument("checkpoint: parameter length does not match architecture");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open for writing: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(arch.layer_sizes.size()));
    for (int size : arch.layer_sizes) put_u32(out, static_cast<std::uint32_t>(size));
    for (double p : params) {
        std::uint64_t bits;
        std::memcpy(&bits, &p, sizeof(bits));
        char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
        out.write(bytes, 8);
    }
    if (!out) throw std::runtime_error("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open for reading: " + path.string());

    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());

    const std::uint32_t n_layers = get_u32(in);
    if (n_layers < 2 || n_layers > 64)
        throw std::runtime_error("checkpoint: implausible layer count in " + path.string());
    Checkpoint ckpt;
    ckpt.arch.layer_sizes.resize(n_layers);
    for (std::uint32_t i = 0; i < n_layers; ++i)
        ckpt.arch.layer_sizes[i] = static_cast<int>(get_u32(in));
    ckpt.arch.validate();

    ckpt.params.resize(ckpt.arch.param_count());
    for (double& p : ckpt.params) {
        char bytes[8];
        if (!in.read(bytes, 8)) throw std::runtime_error("checkpoint: truncated file");
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
        std::memcpy(&p, &bits, sizeof(p));
    }
    if (in.get() != std::ifstream::traits_type::eof())
        throw std::runtime_error("checkpoint: trailing bytes in " + path.string());
    return ckpt;
}

}  // namespace uavrl
