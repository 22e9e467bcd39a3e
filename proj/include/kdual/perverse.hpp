#pragma once

#include "kdual/dcat.hpp"

#include <optional>
#include <vector>

namespace kdual {

enum class Truncation { tau, tau_prime };

struct ConstructionTrace {
        std::vector<FaceId> order;             /* cones processed after the starting cone */
        std::vector<BigradedDims> kept;         /* per step: hom classes used, doubled (a,b) */
        std::vector<std::size_t> sizes;         /* per step: summand count after minimizing */
};

struct BuildOptions {
        std::optional<std::vector<FaceId>> order; /* custom linear extension, else (dim, rays) */
        std::optional<unsigned> perturb_seed;     /* shuffle summands and mix representatives */
};

struct BuildResult {
        InjComplex complex;
        ConstructionTrace trace;
};

/* N_tau<k>: J_tau in degree -c/2 and grading -c/2, then twisted. */
InjComplex costandard(const ContextPtr &ctx, FaceId tau, int k = 0);
/* M_tau: extension by zero of the constant sheaf on the star of tau, same normalization as N_tau. */
InjComplex standard(const ContextPtr &ctx, FaceId tau);
BuildResult simple(const ContextPtr &ctx, FaceId tau, Truncation variant = Truncation::tau, const BuildOptions &opts = {});
BuildResult injective_hull(const ContextPtr &ctx, FaceId tau, const BuildOptions &opts = {});

/* Default orders: cones above tau by increasing dimension, cones below by decreasing dimension. */
std::vector<FaceId> default_simple_order(const Fan &fan, FaceId tau);
std::vector<FaceId> default_injective_order(const Fan &fan, FaceId tau);
/* A random linear extension of the same partial order. */
std::vector<FaceId> random_linear_extension(const Fan &fan, std::vector<FaceId> cones, bool increasing, unsigned seed);

/* Relabel summands by a permutation (summand i becomes perm[i]). */
InjComplex permute_summands(const InjComplex &s, const std::vector<std::size_t> &perm);

/* Incidence sign of a facet pair rho < rho' from the oriented canonical span bases. */
int incidence(const Fan &fan, FaceId rho, FaceId rho_up);

} // namespace kdual
