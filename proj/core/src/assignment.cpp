#include "milde/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "milde/errors.hpp"

namespace milde {

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
    if (rows == 0 || cols == 0)
        throw StructuralError("similarity matrix must be non-empty");
    if (!(fill >= 0.0 && fill <= 1.0))
        throw StructuralError("similarity entries must be finite and in [0,1]");
}

void SimilarityMatrix::set(std::size_t r, std::size_t c, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw StructuralError("similarity entries must be finite and in [0,1]");
    values_[r * cols_ + c] = v;
}

double iou(const Mask& a, const Mask& b) {
    if (!a.same_size(b)) throw StructuralError("iou: mask dimensions differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        const bool pa = a.bits[i] != 0;
        const bool pb = b.bits[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0; // both empty: absent layers agree
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// O(n^3) Hungarian algorithm with potentials, square cost matrix,
// minimizing total cost. Returns row -> col.
std::vector<int> solve_min_assignment(const std::vector<double>& cost, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * static_cast<std::size_t>(n) + (j - 1)] -
                                   u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

// Maximum total similarity over one-to-one assignments of the given row/col
// subsets (size = min of the two), via zero padding to a square problem.
double max_total_on(const SimilarityMatrix& s, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols) {
    if (rows.empty() || cols.empty()) return 0.0;
    const int n = static_cast<int>(std::max(rows.size(), cols.size()));
    std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            cost[r * static_cast<std::size_t>(n) + c] = -s(rows[r], cols[c]);

    const std::vector<int> row_to_col = solve_min_assignment(cost, n);
    double total = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int c = row_to_col[r];
        if (c >= 0 && static_cast<std::size_t>(c) < cols.size()) total += s(rows[r], cols[c]);
    }
    return total;
}

constexpr double kTieEps = 1e-9;

} // namespace

std::vector<AssignedPair> hungarian_max(const SimilarityMatrix& similarity) {
    const std::size_t n_rows = similarity.rows();
    const std::size_t n_cols = similarity.cols();

    std::vector<std::size_t> all_rows(n_rows), free_cols(n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) all_rows[r] = r;
    for (std::size_t c = 0; c < n_cols; ++c) free_cols[c] = c;

    const double best_total = max_total_on(similarity, all_rows, free_cols);

    // Greedy lexicographic refinement: walk rows in order and keep the first
    // (row, col) choice that still attains the optimal total. O(n) Hungarian
    // solves per row; assignment problems here are layer-scale.
    std::vector<AssignedPair> pairs;
    double fixed_weight = 0.0;
    std::vector<std::size_t> future_rows(all_rows.begin() + 1, all_rows.end());

    for (std::size_t r = 0; r < n_rows; ++r) {
        bool matched = false;
        for (std::size_t ci = 0; ci < free_cols.size(); ++ci) {
            const std::size_t c = free_cols[ci];
            std::vector<std::size_t> rest_cols = free_cols;
            rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(ci));
            const double candidate = fixed_weight + similarity(r, c) +
                                     max_total_on(similarity, future_rows, rest_cols);
            if (candidate >= best_total - kTieEps) {
                pairs.push_back(AssignedPair{r, c});
                fixed_weight += similarity(r, c);
                free_cols = std::move(rest_cols);
                matched = true;
                break;
            }
        }
        (void)matched; // row r stays unmatched when n_rows > n_cols and no column preserves the optimum
        if (!future_rows.empty()) future_rows.erase(future_rows.begin());
    }
    return pairs;
}

double assignment_total(const SimilarityMatrix& similarity,
                        const std::vector<AssignedPair>& pairs) {
    double total = 0.0;
    for (const AssignedPair& p : pairs) total += similarity(p.row, p.col);
    return total;
}

} // namespace milde
