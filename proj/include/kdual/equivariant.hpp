#pragma once

#include "kdual/dcat.hpp"

#include <map>
#include <string>
#include <vector>

namespace kdual {

struct EquivariantError : std::runtime_error {
        std::string kind;
        EquivariantError(std::string k, const std::string &msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

using Exponent = std::vector<unsigned>;

/* Polynomial in the canonical coordinates of some V_sigma; each variable has degree two. */
struct Poly {
        std::map<Exponent, Rational> terms;
        std::size_t nvars = 0;

        static Poly constant(std::size_t nvars, Rational c);
        static Poly variable(std::size_t nvars, std::size_t i);
        bool is_zero() const { return terms.empty(); }
        Poly operator*(const Poly &o) const;
        Poly &operator+=(const Poly &o);
};

/* Monomials of polynomial degree k in d variables, lexicographic. */
const std::vector<Exponent> &poly_monomials(std::size_t d, std::size_t k);

using GradedDims = std::map<int, std::size_t>;

/*
 * Minimal extension sheaf on the cones above tau: free stalks with
 * generator degrees, and restriction matrices for every pair rho <= sigma.
 */
struct ASheaf {
        std::shared_ptr<const Fan> fan;
        FaceId tau = 0;
        std::vector<bool> support;
        std::vector<std::vector<int>> gen_degrees;
        /* restriction[{sigma, rho}][j][k]: image of generator j of sigma on generator k of rho */
        std::map<std::pair<FaceId, FaceId>, std::vector<std::vector<Poly>>> restriction;
        int window_extra = 0;
};

/* Extra room above the default window, from KOSZUL_DEGREE_WINDOW. */
int degree_window_extra();

ASheaf minimal_extension_sheaf(std::shared_ptr<const Fan> fan, FaceId tau, int window_extra = degree_window_extra());

struct LocalIC {
        GradedDims stalk, costalk;
};
LocalIC local_ic_dims(const ASheaf &l, FaceId sigma);

/* Stanley g-vector of the Eulerian interval [tau, sigma] of the face lattice. */
std::vector<long long> g_interval(const Fan &fan, FaceId tau, FaceId sigma);
/* g-vector of the polytope cross-section of a pointed cone given as its face lattice. */
std::vector<long long> g_oracle(const Fan &cone_fan);
/* h-vector of the same interval, from the recursion. */
std::vector<long long> h_interval(const Fan &fan, FaceId tau, FaceId sigma);

struct Prediction {
        BigradedDims stalk, costalk;
};
/* Degree j of the reduced stalk lands in doubled bidegree (j, j). */
std::map<FaceId, Prediction> h_transfer(const ASheaf &l);

struct PurityItem {
        FaceId sigma = 0;
        bool diagonal = false;
        bool matches = false;
        BigradedDims stalk, costalk;
        Prediction expected;
};

struct PurityReport {
        FaceId tau = 0;
        std::vector<PurityItem> items;
        bool passed() const;
};

PurityReport crosscheck_purity(const ContextPtr &ctx, FaceId tau);

bool is_diagonal(const BigradedDims &d);

} // namespace kdual
