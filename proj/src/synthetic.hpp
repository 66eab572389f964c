#pragma once

#include <string>

#include "table.hpp"

namespace survkit {

struct SynthSpec {
    std::size_t rows = 400;
    std::size_t n_numeric = 6;       // clinical numeric features
    std::size_t n_categorical = 3;   // clinical categorical features
    std::size_t n_genes = 200;       // expression columns
    std::size_t n_cna = 10;
    std::size_t n_mutation = 5;
    std::size_t informative = 4;     // features carrying the latent risk
    double label_noise = 0.05;       // class flip probability
    double missing_rate = 0.05;
    double unlabeled_fraction = 0.15;  // censored before the horizon
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthData {
    TableFrame clinical;
    TableFrame expression;
    TableFrame cna;
    TableFrame mutation;
};

/// Deterministic generator for a clinical-like frame (mixed numeric and
/// categorical features, MAR missingness, survival response columns) and an
/// aligned genomic-like trio. A latent per-patient risk drives the class,
/// the informative clinical numerics, the first categorical, the informative
/// genes, and the first CNA column; everything else is noise.
SynthData generate_synthetic(const SynthSpec& spec);

}  // namespace survkit
