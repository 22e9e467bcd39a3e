#pragma once

#include "kdual/fan.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace kdual {

using Mask = std::uint32_t;

std::size_t binomial(std::size_t n, std::size_t k);

/*
 * Elements of the ambient algebra Lambda(Q^n) are dense vectors of length
 * 2^n indexed by bit masks over the standard basis.
 */
namespace ambient {
QVector unit(std::size_t n);
QVector vector(const QVector &v); /* degree one element */
QVector wedge(const QVector &a, const QVector &b, std::size_t n);
QVector contract(const QVector &v, const QVector &a, std::size_t n); /* interior product by v in Q^n */
int reorder_sign(Mask a, Mask b); /* sign of e_a ^ e_b relative to e_{a|b} */
} // namespace ambient

/* Lambda(W) for a subspace W of Q^n, monomials = sorted subsets of the canonical basis. */
class ExtAlgebra {
public:
        ExtAlgebra() = default;
        ExtAlgebra(QMatrix basis, std::size_t n);

        std::size_t dim() const { return basis_.rows(); }
        std::size_t ambient_dim() const { return n_; }
        const QMatrix &basis() const { return basis_; }
        std::size_t graded_dim(std::size_t k) const { return k <= dim() ? binomial(dim(), k) : 0; }
        const std::vector<Mask> &monomials(std::size_t k) const { return monomials_.at(k); }
        std::size_t index(Mask m) const { return index_.at(m); }

        QVector ambient(Mask m) const;               /* wedge of the basis vectors in m */
        QVector ambient(std::size_t k, const QVector &coeffs) const;
        std::optional<QVector> coordinates(std::size_t k, const QVector &ambient_element) const;

private:
        std::size_t n_ = 0;
        QMatrix basis_;
        std::vector<std::vector<Mask>> monomials_;
        std::map<Mask, std::size_t> index_;
        std::vector<QMatrix> embed_; /* per degree: 2^n x C(d,k) ambient columns */
};

/* Graded dual element: coefficients on dual monomials of Lambda^degree. */
struct ExtDual {
        std::size_t degree = 0;
        QVector coeffs;
};

/*
 * Fan with completion, plus write-once caches for the relative exterior
 * algebras Lambda(Phi^tau_sigma) and the composition matrices.
 */
class FanContext {
public:
        FanContext(std::shared_ptr<const Fan> fan, Completion phi);

        const Fan &fan() const { return *fan_; }
        std::shared_ptr<const Fan> fan_ptr() const { return fan_; }
        const Completion &completion() const { return phi_; }
        std::size_t n() const { return fan_->ambient_dim(); }

        /* Lambda(Phi^tau_sigma); requires tau <= sigma. */
        const ExtAlgebra &rel(FaceId tau, FaceId sigma) const;
        std::size_t rel_dim(FaceId tau, FaceId sigma) const;

        /*
         * Matrix of (f, g) -> f o g for f in Lambda^p(Phi^tau_sigma)*, g in
         * Lambda^q(Phi^rho_tau)*, acting on the Kronecker product f (x) g.
         */
        const QMatrix &compose_matrix(FaceId rho, FaceId tau, FaceId sigma, std::size_t p, std::size_t q) const;

        /* x ^ y in Lambda(Phi^rho_sigma) for x in Lambda^p(Phi^tau_sigma), y in Lambda^q(Phi^rho_tau). */
        const QMatrix &wedge_matrix(FaceId rho, FaceId tau, FaceId sigma, std::size_t p, std::size_t q) const;

private:
        std::shared_ptr<const Fan> fan_;
        Completion phi_;
        mutable std::mutex mu_;
        mutable std::map<std::pair<FaceId, FaceId>, std::unique_ptr<ExtAlgebra>> rel_;
        using Key = std::tuple<FaceId, FaceId, FaceId, std::size_t, std::size_t>;
        mutable std::map<Key, std::unique_ptr<QMatrix>> wedge_, compose_;
};

using ContextPtr = std::shared_ptr<const FanContext>;

ContextPtr make_context(std::shared_ptr<const Fan> fan, Completion phi);
ContextPtr make_context(const Fan &fan); /* orthogonal completion */

/* Dual monomial basis of hom(J_tau, J_sigma), indexed by exterior degree p (grading -p). */
std::vector<std::size_t> hom_space_dims(const FanContext &ctx, FaceId tau, FaceId sigma);

/* f in hom(J_tau, J_sigma), g in hom(J_rho, J_tau). */
ExtDual compose_hom(const FanContext &ctx, FaceId rho, FaceId tau, FaceId sigma, const ExtDual &f, const ExtDual &g);

QVector kron(const QVector &a, const QVector &b);

} // namespace kdual
