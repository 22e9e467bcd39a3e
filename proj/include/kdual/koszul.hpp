#pragma once

#include "kdual/perverse.hpp"

#include <map>
#include <string>
#include <vector>

namespace kdual {

/*
 * A full-dimensional cone with completion, its dual cone with the dual
 * completion, and the order-reversing face bijection between them.
 */
struct DualityContext {
        ContextPtr primal, dual;
        std::vector<FaceId> perp;     /* primal face -> dual face */
        std::vector<FaceId> perp_inv; /* dual face -> primal face */
        Rational omega_unit{1};       /* determinant of the top-face Phi basis */

        std::size_t n() const { return primal->n(); }
};

DualityContext make_duality(const ContextPtr &primal);

/* kappa: D([sigma]) -> D([sigma dual]), contravariant; kappa_inverse goes back. */
InjComplex kappa(const DualityContext &dc, const InjComplex &s);
InjComplex kappa_inverse(const DualityContext &dc, const InjComplex &t);
/* For f: S -> T returns kappa(f): kappa(T) -> kappa(S). */
ChainMap kappa_map(const DualityContext &dc, const ChainMap &f);

/* Entry transport for one pair mu <= nu of the source fan (exposed for tests). */
QVector kappa_entry(const FanContext &src, const FanContext &dst, const std::vector<FaceId> &perp, FaceId mu, FaceId nu,
                    std::size_t p, const QVector &g);

struct FaceCheck {
        FaceId face = 0, partner = 0;
        bool ok = false;
        std::string detail;
};

struct KoszulEntry {
        FaceId tau = 0, rho = 0;
        BigradedDims dims; /* Hom^a_b(L_tau, L_rho), doubled */
};

struct DualityReport {
        std::vector<FaceCheck> simple_to_injective;   /* kappa(L_tau) ~ I_{tau perp} */
        std::vector<FaceCheck> injective_to_simple;   /* kappa(I_tau) ~ L_{tau perp} on the dual */
        std::vector<KoszulEntry> koszul_table;
        bool koszul = true;                           /* zero unless a = b */
        std::vector<FaceCheck> ext_ring;              /* End of injectives vs diagonal Ext, per pair */
        bool passed() const;
};

struct VerifyOptions {
        bool duality = true;
        bool koszulity = true;
        bool ext_ring = true;
        unsigned jobs = 1;
};

/* Hom^a_b(L_tau, L_rho) for all pairs of faces of the primal cone. */
std::vector<KoszulEntry> koszul_table(const ContextPtr &ctx, unsigned jobs = 1);
DualityReport verify_duality(const DualityContext &dc, const VerifyOptions &opts = {});

} // namespace kdual
