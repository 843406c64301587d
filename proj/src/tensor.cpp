#include "mlad/tensor.hpp"

#include <sstream>

#include "mlad/error.hpp"
#include "mlad/kernels.hpp"

namespace mlad {

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

namespace {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw DimensionError("non-positive dimension in shape " + shape_str(shape));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

} // namespace

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_numel(shape_) != data_.size())
        throw DimensionError("shape " + shape_str(shape_) + " does not match data length " +
                             std::to_string(data_.size()));
    check_finite("tensor construction");
}

Tensor Tensor::zeros(std::vector<int> shape) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<int> shape, double v) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, v));
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> data) {
    return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::eye(int n, double v) {
    Tensor t = zeros({n, n});
    for (int i = 0; i < n; ++i) t.at(i, i) = v;
    return t;
}

int Tensor::rows() const {
    if (rank() != 2) throw DimensionError("rows() on tensor of shape " + shape_string());
    return shape_[0];
}

int Tensor::cols() const {
    if (rank() != 2) throw DimensionError("cols() on tensor of shape " + shape_string());
    return shape_[1];
}

double& Tensor::at(int i, int j) {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols()) +
                 static_cast<std::size_t>(j)];
}

double Tensor::at(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols()) +
                 static_cast<std::size_t>(j)];
}

std::span<double> Tensor::row(int i) {
    const int c = cols();
    return std::span<double>(data_.data() + static_cast<std::size_t>(i) * c,
                             static_cast<std::size_t>(c));
}

std::span<const double> Tensor::row(int i) const {
    const int c = cols();
    return std::span<const double>(data_.data() + static_cast<std::size_t>(i) * c,
                                   static_cast<std::size_t>(c));
}

void Tensor::check_finite(const char* context) const {
    if (!kern::active().all_finite(data_.data(), data_.size()))
        throw NumericError(std::string(context) + ": non-finite value in tensor of shape " +
                           shape_string());
}

void mm_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    const auto& be = kern::active();
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            be.axpy(arow[p], b + static_cast<std::size_t>(p) * n, crow,
                    static_cast<std::size_t>(n));
        }
    }
}

void mm_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    const auto& be = kern::active();
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        double* crow = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            crow[j] += be.dot(arow, b + static_cast<std::size_t>(j) * k,
                              static_cast<std::size_t>(k));
        }
    }
}

void mm_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    const auto& be = kern::active();
    for (int p = 0; p < k; ++p) {
        const double* arow = a + static_cast<std::size_t>(p) * m;
        const double* brow = b + static_cast<std::size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            be.axpy(arow[i], brow, c + static_cast<std::size_t>(i) * n,
                    static_cast<std::size_t>(n));
        }
    }
}

} // namespace mlad
