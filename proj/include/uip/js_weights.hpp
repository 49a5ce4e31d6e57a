#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uip/core.hpp"
#include "uip/data.hpp"

namespace uip {

/// f_ini(theta | D): a Normal or Beta density under a noninformative initial prior.
using InitialPosterior = std::variant<Normal, Beta>;

/// Binary: exact Jeffreys posterior Beta(y + 1/2, n - y + 1/2).
/// Continuous: plug-in Normal(mean, sigma_mle^2 / n). Coefficient: Normal(estimate, se^2).
InitialPosterior initial_posterior(const DatasetSummary& s);

double kl_divergence(const Normal& p, const Normal& q);
double kl_divergence(const Beta& p, const Beta& q);
/// Throws VariantMismatch when the two families differ.
double kl_divergence(const InitialPosterior& p, const InitialPosterior& q);

/// Symmetrized KL: (KL(p | q) + KL(q | p)) / 2.
double js_distance(const InitialPosterior& p, const InitialPosterior& q);

/// Patient-level outcomes for the subsampling route (0/1 values for binary endpoints).
struct PatientLevel {
  EndpointKind kind;
  std::vector<double> values;
};

/// Average js_distance over `repeats` size-n subsamples of the historical records (without replacement).
/// Repeat r draws with seed derive_seed(seed, r).
double js_distance_subsampled(const PatientLevel& current, const PatientLevel& historical, int repeats,
                              std::uint64_t seed);

struct DistanceReport {
  Eigen::VectorXd d;
  std::vector<bool> subsampled;
  int repeats_used = 0;
};

/// Distances between the current study and each historical study. When n_k > n, uses the patient-level
/// subsampling route if records are supplied, otherwise the summary surrogate that caps historical
/// information at n observations.
DistanceReport js_distances(const StudySet& studies,
                            std::span<const std::optional<PatientLevel>> historical_records = {},
                            const std::optional<PatientLevel>& current_records = std::nullopt,
                            int repeats = 100, std::uint64_t seed = 1);

/// Distances from precomputed initial posteriors (already capped by the caller).
DistanceReport js_distances(const InitialPosterior& current, std::span<const InitialPosterior> historical);

/// w_k proportional to 1 / max(d_k, 1e-6).
WeightVector js_weights(const DistanceReport& report);
WeightVector js_weights(const Eigen::VectorXd& distances);

/// Initial posterior of a dataset with its information capped at n_cap observations.
InitialPosterior capped_initial_posterior(const DatasetSummary& s, long n_cap);

}  // namespace uip
