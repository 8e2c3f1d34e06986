#pragma once

#include <vector>

#include "ufm/matrix.hpp"

namespace ufm {

// A STEP-imbalanced classification instance: k classes (k even), the first
// k/2 "majority" classes carry R times as many examples as the k/2 minority
// classes. n_min is the per-minority-class example count and d the embedding
// dimension of the two-factor model trained on the instance.
struct StepConfig {
    int k = 4;        // class count; even, >= 4 (three spectral levels need k/2-1 >= 1)
    double R = 1.0;   // imbalance ratio; >= 1, R*n_min must be integral
    int n_min = 1;    // examples per minority class; >= 1
    int d = 0;        // embedding dimension; >= k-1 so interpolation is feasible

    int majority_size() const;   // R*n_min as an exact integer
    int total_examples() const;  // n = (R+1)*(k/2)*n_min

    // Throws ConfigError naming the violated invariant.
    void validate() const;
};

// One-hot label matrix: k x n with exactly one 1 per column, columns grouped
// by class with the majority classes first.
struct LabelMatrix {
    Matrix entries;
    std::vector<int> class_sizes;  // column count per class, length k
};

// Simplex-encoded (centered one-hot) label matrix: Z = (I - (1/k) 11^T) Y.
// Columns sum to zero; a class-c column is e_c - (1/k) 1.
struct SelMatrix {
    Matrix entries;
};

LabelMatrix build_step_onehot(const StepConfig& cfg);
SelMatrix center_labels(const LabelMatrix& Y);

// True class index of each column (derived from the class-block layout).
std::vector<int> column_labels(const LabelMatrix& Y);

}  // namespace ufm
