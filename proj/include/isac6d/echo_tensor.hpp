#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

// The 4-way received-echo tensor indexed (n_R^x, n_R^z, n, m) and its binary
// dump format. Storage is row-major in that index order, so each antenna's
// (N x M) slice is contiguous.

namespace isac6d {

enum class TensorStage : std::uint32_t { raw = 0, eec = 1, dt_eec = 2 };

const char* stage_name(TensorStage s);

class EchoTensor {
public:
    EchoTensor() = default;
    EchoTensor(int nrx, int nrz, int n_symbols, int m_subcarriers,
               TensorStage stage = TensorStage::raw)
        : nrx_(nrx), nrz_(nrz), n_(n_symbols), m_(m_subcarriers), stage_(stage),
          data_(static_cast<size_t>(nrx) * nrz * n_symbols * m_subcarriers) {}

    int nrx() const { return nrx_; }
    int nrz() const { return nrz_; }
    int n_symbols() const { return n_; }
    int m_subcarriers() const { return m_; }
    TensorStage stage() const { return stage_; }
    void set_stage(TensorStage s) { stage_ = s; }

    size_t size() const { return data_.size(); }
    std::complex<double>* data() { return data_.data(); }
    const std::complex<double>* data() const { return data_.data(); }

    std::complex<double>& at(int ix, int iz, int n, int m) {
        return data_[index(ix, iz, n, m)];
    }
    const std::complex<double>& at(int ix, int iz, int n, int m) const {
        return data_[index(ix, iz, n, m)];
    }

    // Contiguous (N x M) block for one antenna, row-major in (n, m).
    std::complex<double>* antenna_slice(int ix, int iz) {
        return data_.data() + index(ix, iz, 0, 0);
    }
    const std::complex<double>* antenna_slice(int ix, int iz) const {
        return data_.data() + index(ix, iz, 0, 0);
    }

    double energy() const;

    size_t index(int ix, int iz, int n, int m) const {
        return ((static_cast<size_t>(ix) * nrz_ + iz) * n_ + n) * m_ + m;
    }

private:
    int nrx_ = 0;
    int nrz_ = 0;
    int n_ = 0;
    int m_ = 0;
    TensorStage stage_ = TensorStage::raw;
    std::vector<std::complex<double>> data_;
};

// Binary dump: fixed little-endian header (magic, version, stage, dims, seed)
// followed by interleaved complex64 samples in (ix, iz, n, m) order.
void dump_tensor(const std::string& path, const EchoTensor& t, std::uint64_t seed);

struct TensorFile {
    EchoTensor tensor;
    std::uint64_t seed = 0;
};

TensorFile load_tensor(const std::string& path);

}  // namespace isac6d
