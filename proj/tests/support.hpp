#pragma once

#include "kdual/equivariant.hpp"
#include "kdual/koszul.hpp"
#include "kdual/perverse.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsup {

using namespace kdual;

QVector vec(std::initializer_list<long> xs);

Fan ray_fan();
Fan quadrant_fan();
Fan simplex3_fan();
Fan square_cone_fan();
Fan mgon_cone(int m); /* cone over the m-gon with vertices (i, i^2, 1) */

struct NamedContext {
        std::string name;
        ContextPtr ctx;
};
/* ray, quadrant, simplex3, square cone; with_duals appends each dual cone. */
std::vector<NamedContext> test_contexts(bool with_duals);

FaceId face_by_rays(const Fan &fan, const std::vector<QVector> &rays);

/* Face counts by dimension via facet normals of (d-1)-subsets of generators. Full-dimensional cones only. */
std::vector<std::size_t> brute_force_face_counts(const std::vector<QVector> &gens, std::size_t n);

/* Standalone multivectors over Q^n: sorted index lists to coefficients. */
using Multivector = std::map<std::vector<int>, Rational>;
Multivector mv_vector(const QVector &v);
Multivector mv_wedge(const Multivector &a, const Multivector &b);
Multivector mv_monomial(const QMatrix &basis, Mask m);
/* Coordinates of a degree-k multivector in the monomial basis of alg. */
QVector mv_coordinates(const ExtAlgebra &alg, std::size_t k, const Multivector &x);

bool same_complex(const InjComplex &a, const InjComplex &b);
bool same_map(const ChainMap &f, const ChainMap &g);
BigradedDims translate(const BigradedDims &d, int du, int dv);

class Rng {
public:
        explicit Rng(std::uint64_t seed) : g_(seed) {}
        int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
        bool coin(int percent = 50) { return range(0, 99) < percent; }
        Rational scalar(bool nonzero = false);
        QVector vector(std::size_t n);
        template <class T> const T &pick(const std::vector<T> &v) { return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))]; }
        std::mt19937_64 &engine() { return g_; }

private:
        std::mt19937_64 g_;
};

/* Perverse objects of one context, built once. */
struct ObjectBank {
        ContextPtr ctx;
        std::vector<InjComplex> costandards, standards, simples, injectives;
        explicit ObjectBank(ContextPtr c);
};

/* Random three-term complex with random homogeneous entries and d^2 = 0 solved linearly. */
InjComplex random_three_term(const ContextPtr &ctx, Rng &rng);
/* Random complex from perverse objects, shifts, sums, cones of random maps and permutations. */
InjComplex random_complex(const ObjectBank &bank, Rng &rng);
ChainMap random_chain_map(const InjComplex &s, const InjComplex &t, Rng &rng);
std::vector<bool> random_closed_subset(const Fan &fan, Rng &rng);

struct PropertyOutcome {
        std::string name;
        std::size_t cases = 0, failures = 0;
        std::string detail;
        bool ok() const { return cases > 0 && failures == 0; }
};

PropertyOutcome prop_d_squared(std::size_t cases, std::uint64_t seed);
PropertyOutcome prop_compose_associativity(std::size_t cases, std::uint64_t seed);
PropertyOutcome prop_wedge_pairing(std::size_t cases, std::uint64_t seed);
PropertyOutcome prop_shift_group(std::size_t cases, std::uint64_t seed);
PropertyOutcome prop_open_closed_vanishing(std::size_t cases, std::uint64_t seed); /* j^* i_* = 0 */
PropertyOutcome prop_closed_roundtrip(std::size_t cases, std::uint64_t seed);      /* i^! i_* = id */
PropertyOutcome prop_gamma_twist(std::size_t cases, std::uint64_t seed);
PropertyOutcome prop_minimize_homs(std::size_t cases, std::uint64_t seed);

} // namespace testsup
