#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mlad {

std::string shape_str(const std::vector<int>& shape);

// Dense row-major float64 tensor. Rank 0 (scalar), 1 (vector) and 2 (matrix)
// are what the engine uses. Construction validates that every entry is
// finite, so no committed tensor ever carries NaN/Inf.
class Tensor {
public:
    Tensor() : shape_{}, data_(1, 0.0) {}

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double v);
    static Tensor from(std::vector<int> shape, std::vector<double> data);
    static Tensor scalar(double v);
    // n x n identity scaled by v.
    static Tensor eye(int n, double v = 1.0);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    std::size_t numel() const { return data_.size(); }

    // Rank-2 accessors.
    int rows() const;
    int cols() const;
    double& at(int i, int j);
    double at(int i, int j) const;
    std::span<double> row(int i);
    std::span<const double> row(int i) const;

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    double* raw() { return data_.data(); }
    const double* raw() const { return data_.data(); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
    std::string shape_string() const { return shape_str(shape_); }

    // Re-checks the finiteness invariant after in-place mutation.
    void check_finite(const char* context) const;

private:
    Tensor(std::vector<int> shape, std::vector<double> data);

    std::vector<int> shape_;
    std::vector<double> data_;
};

// Dense helpers over raw row-major buffers; all accumulate into C, which the
// caller zero-initializes. Backed by the active kernel backend.
void mm_nn(const double* a, const double* b, double* c, int m, int k, int n); // C += A*B
void mm_nt(const double* a, const double* b, double* c, int m, int k, int n); // C += A*B^T, B is n x k
void mm_tn(const double* a, const double* b, double* c, int m, int k, int n); // C += A^T*B, A is k x m

} // namespace mlad
