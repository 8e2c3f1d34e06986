#include "ufm/sel.hpp"

#include <cmath>

#include "ufm/errors.hpp"

namespace ufm {

namespace {

// R*n_min must be a whole number of majority examples; allow a hair of
// floating-point slack for values like 2.5 * 2.
long rounded_if_integral(double x, const char* what) {
    const double r = std::round(x);
    if (std::fabs(x - r) > 1e-9 * std::max(1.0, std::fabs(x)))
        throw ConfigError(std::string(what) + " must be an integer, got " + std::to_string(x));
    return static_cast<long>(r);
}

}  // namespace

int StepConfig::majority_size() const {
    return static_cast<int>(rounded_if_integral(R * n_min, "R*n_min"));
}

int StepConfig::total_examples() const {
    return (majority_size() + n_min) * (k / 2);
}

void StepConfig::validate() const {
    if (k < 4 || k % 2 != 0) throw ConfigError("k must be even and >= 4");
    if (!(R >= 1.0)) throw ConfigError("R must be >= 1");
    if (n_min < 1) throw ConfigError("n_min must be >= 1");
    rounded_if_integral(R * n_min, "R*n_min");
    if (d < k - 1) throw ConfigError("d must be >= k-1");
}

LabelMatrix build_step_onehot(const StepConfig& cfg) {
    cfg.validate();
    const int k = cfg.k;
    const int n_maj = cfg.majority_size();
    const int n = cfg.total_examples();

    LabelMatrix Y;
    Y.entries = Matrix(k, n);
    Y.class_sizes.assign(k, 0);
    for (int c = 0; c < k / 2; ++c) Y.class_sizes[c] = n_maj;
    for (int c = k / 2; c < k; ++c) Y.class_sizes[c] = cfg.n_min;

    int col = 0;
    for (int c = 0; c < k; ++c)
        for (int j = 0; j < Y.class_sizes[c]; ++j) Y.entries(c, col++) = 1.0;
    return Y;
}

SelMatrix center_labels(const LabelMatrix& Y) {
    const int k = Y.entries.rows();
    const int n = Y.entries.cols();
    if (k < 1 || n < 1) throw ConfigError("label matrix must be non-empty");

    // Validate one-hot-ness: entries in {0,1}, exactly one 1 per column.
    for (int c = 0; c < n; ++c) {
        int ones = 0;
        for (int r = 0; r < k; ++r) {
            const double v = Y.entries(r, c);
            if (v != 0.0 && v != 1.0) throw ConfigError("label matrix entries must be 0 or 1");
            if (v == 1.0) ++ones;
        }
        if (ones != 1) throw ConfigError("label matrix must have exactly one 1 per column");
    }

    // Column for class c becomes e_c - (1/k) 1: one entry (k-1)/k, rest -1/k.
    SelMatrix Z;
    Z.entries = Matrix(k, n);
    const double off = -1.0 / k;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < k; ++r)
            Z.entries(r, c) = (Y.entries(r, c) == 1.0) ? (k - 1.0) / k : off;
    return Z;
}

std::vector<int> column_labels(const LabelMatrix& Y) {
    std::vector<int> labels;
    labels.reserve(Y.entries.cols());
    for (size_t c = 0; c < Y.class_sizes.size(); ++c)
        for (int j = 0; j < Y.class_sizes[c]; ++j) labels.push_back(static_cast<int>(c));
    return labels;
}

}  // namespace ufm
