#pragma once

#include <cstddef>
#include <vector>

#include "milde/doc_model.hpp"

namespace milde {

/// Dense rows x cols similarity matrix with entries in [0,1].
class SimilarityMatrix {
public:
    SimilarityMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, double v);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Intersection over union of two same-size binary masks.
/// Two empty masks agree perfectly and score 1; empty vs non-empty is 0.
double iou(const Mask& a, const Mask& b);

struct AssignedPair {
    std::size_t row = 0;
    std::size_t col = 0;

    bool operator==(const AssignedPair&) const = default;
};

/// Maximum-weight one-to-one assignment of size min(rows, cols), computed
/// exactly (Hungarian algorithm on the zero-padded square problem). Among
/// equally optimal assignments the lexicographically smallest pair list wins:
/// lowest row first, then lowest column. Output is sorted by row.
std::vector<AssignedPair> hungarian_max(const SimilarityMatrix& similarity);

double assignment_total(const SimilarityMatrix& similarity,
                        const std::vector<AssignedPair>& pairs);

} // namespace milde
