#include "isac6d/echo_tensor.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace isac6d {

namespace {
constexpr char kMagic[8] = {'I', '6', 'T', 'E', 'N', 'S', 'O', 'R'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}
}  // namespace

const char* stage_name(TensorStage s) {
    switch (s) {
        case TensorStage::raw: return "raw";
        case TensorStage::eec: return "eec";
        case TensorStage::dt_eec: return "dt_eec";
    }
    return "unknown";
}

double EchoTensor::energy() const {
    double e = 0.0;
    for (const auto& v : data_) e += std::norm(v);
    return e;
}

void dump_tensor(const std::string& path, const EchoTensor& t, std::uint64_t seed) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_tensor: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint32_t>(t.stage()));
    write_pod(os, static_cast<std::uint32_t>(t.nrx()));
    write_pod(os, static_cast<std::uint32_t>(t.nrz()));
    write_pod(os, static_cast<std::uint32_t>(t.n_symbols()));
    write_pod(os, static_cast<std::uint32_t>(t.m_subcarriers()));
    write_pod(os, seed);
    for (size_t i = 0; i < t.size(); ++i) {
        const float re = static_cast<float>(t.data()[i].real());
        const float im = static_cast<float>(t.data()[i].imag());
        write_pod(os, re);
        write_pod(os, im);
    }
    if (!os) throw std::runtime_error("dump_tensor: write failed for " + path);
}

TensorFile load_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_tensor: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_tensor: bad magic in " + path);
    std::uint32_t version = 0, stage = 0, nrx = 0, nrz = 0, n = 0, m = 0;
    std::uint64_t seed = 0;
    read_pod(is, version);
    if (version != kVersion) throw std::runtime_error("load_tensor: unsupported version");
    read_pod(is, stage);
    read_pod(is, nrx);
    read_pod(is, nrz);
    read_pod(is, n);
    read_pod(is, m);
    read_pod(is, seed);
    if (stage > 2 || nrx == 0 || nrz == 0 || n == 0 || m == 0)
        throw std::runtime_error("load_tensor: invalid header fields");

    TensorFile out;
    out.seed = seed;
    out.tensor = EchoTensor(static_cast<int>(nrx), static_cast<int>(nrz), static_cast<int>(n),
                            static_cast<int>(m), static_cast<TensorStage>(stage));
    for (size_t i = 0; i < out.tensor.size(); ++i) {
        float re = 0.f, im = 0.f;
        read_pod(is, re);
        read_pod(is, im);
        out.tensor.data()[i] = {static_cast<double>(re), static_cast<double>(im)};
    }
    if (!is) throw std::runtime_error("load_tensor: truncated file " + path);
    return out;
}

}  // namespace isac6d
