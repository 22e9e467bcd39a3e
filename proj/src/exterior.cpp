#include "kdual/exterior.hpp"

#include <bit>
#include <functional>
#include <stdexcept>

namespace kdual {

std::size_t binomial(std::size_t n, std::size_t k)
{
        if (k > n)
                return 0;
        std::size_t r = 1;
        for (std::size_t i = 1; i <= k; i++)
                r = r * (n - k + i) / i;
        return r;
}

namespace ambient {

QVector unit(std::size_t n)
{
        QVector u(std::size_t(1) << n);
        u[0] = 1;
        return u;
}

QVector vector(const QVector &v)
{
        std::size_t n = v.size();
        QVector out(std::size_t(1) << n);
        for (std::size_t i = 0; i < n; i++)
                out[std::size_t(1) << i] = v[i];
        return out;
}

int reorder_sign(Mask a, Mask b)
{
        /* count pairs (i in a, j in b) with i > j */
        int inversions = 0;
        while (b) {
                int j = std::countr_zero(b);
                b &= b - 1;
                inversions += std::popcount(a >> (j + 1));
        }
        return (inversions & 1) ? -1 : 1;
}

QVector wedge(const QVector &a, const QVector &b, std::size_t n)
{
        std::size_t size = std::size_t(1) << n;
        QVector out(size);
        for (Mask x = 0; x < size; x++) {
                if (sgn(a[x]) == 0)
                        continue;
                for (Mask y = 0; y < size; y++) {
                        if ((x & y) || sgn(b[y]) == 0)
                                continue;
                        Rational t = a[x] * b[y];
                        if (reorder_sign(x, y) < 0)
                                out[x | y] -= t;
                        else
                                out[x | y] += t;
                }
        }
        return out;
}

QVector contract(const QVector &v, const QVector &a, std::size_t n)
{
        std::size_t size = std::size_t(1) << n;
        QVector out(size);
        for (Mask s = 0; s < size; s++) {
                if (sgn(a[s]) == 0)
                        continue;
                int pos = 0;
                for (std::size_t i = 0; i < n; i++) {
                        if (!(s & (Mask(1) << i)))
                                continue;
                        if (sgn(v[i]) != 0) {
                                Rational t = v[i] * a[s];
                                if (pos & 1)
                                        out[s & ~(Mask(1) << i)] -= t;
                                else
                                        out[s & ~(Mask(1) << i)] += t;
                        }
                        pos++;
                }
        }
        return out;
}

} // namespace ambient

ExtAlgebra::ExtAlgebra(QMatrix basis, std::size_t n) : n_(n), basis_(std::move(basis))
{
        std::size_t d = basis_.rows();
        if (d > 20)
                throw std::invalid_argument("exterior algebra too large");
        monomials_.assign(d + 1, {});
        /* lexicographic order of sorted index lists within each degree */
        for (std::size_t k = 0; k <= d; k++) {
                std::vector<std::size_t> idx(k);
                std::function<void(std::size_t, std::size_t)> go = [&](std::size_t pos, std::size_t start) {
                        if (pos == k) {
                                Mask m = 0;
                                for (auto i : idx)
                                        m |= Mask(1) << i;
                                monomials_[k].push_back(m);
                                return;
                        }
                        for (std::size_t i = start; i + (k - pos) <= d; i++) {
                                idx[pos] = i;
                                go(pos + 1, i + 1);
                        }
                };
                go(0, 0);
                for (std::size_t i = 0; i < monomials_[k].size(); i++)
                        index_[monomials_[k][i]] = i;
        }
        std::size_t size = std::size_t(1) << n_;
        embed_.resize(d + 1);
        for (std::size_t k = 0; k <= d; k++) {
                embed_[k] = QMatrix(size, monomials_[k].size());
                for (std::size_t j = 0; j < monomials_[k].size(); j++) {
                        QVector e = ambient(monomials_[k][j]);
                        for (std::size_t r = 0; r < size; r++)
                                embed_[k](r, j) = e[r];
                }
        }
}

QVector ExtAlgebra::ambient(Mask m) const
{
        QVector e = ambient::unit(n_);
        for (std::size_t i = 0; i < dim(); i++)
                if (m & (Mask(1) << i))
                        e = ambient::wedge(e, ambient::vector(basis_.row(i)), n_);
        return e;
}

QVector ExtAlgebra::ambient(std::size_t k, const QVector &coeffs) const
{
        return embed_.at(k) * coeffs;
}

std::optional<QVector> ExtAlgebra::coordinates(std::size_t k, const QVector &ambient_element) const
{
        if (k > dim())
                return is_zero(ambient_element) ? std::optional<QVector>(QVector{}) : std::nullopt;
        return solve(embed_[k], ambient_element);
}

FanContext::FanContext(std::shared_ptr<const Fan> fan, Completion phi) : fan_(std::move(fan)), phi_(std::move(phi))
{
        validate_completion(*fan_, phi_);
}

const ExtAlgebra &FanContext::rel(FaceId tau, FaceId sigma) const
{
        if (!fan_->leq(tau, sigma))
                throw std::invalid_argument("rel: faces not comparable");
        std::lock_guard<std::mutex> lock(mu_);
        auto &slot = rel_[{tau, sigma}];
        if (!slot)
                slot = std::make_unique<ExtAlgebra>(relative_phi(*fan_, phi_, tau, sigma), n());
        return *slot;
}

std::size_t FanContext::rel_dim(FaceId tau, FaceId sigma) const
{
        return fan_->face(sigma).dim - fan_->face(tau).dim;
}

const QMatrix &FanContext::wedge_matrix(FaceId rho, FaceId tau, FaceId sigma, std::size_t p, std::size_t q) const
{
        Key key{rho, tau, sigma, p, q};
        {
                std::lock_guard<std::mutex> lock(mu_);
                auto it = wedge_.find(key);
                if (it != wedge_.end())
                        return *it->second;
        }
        const ExtAlgebra &outer = rel(tau, sigma), &inner = rel(rho, tau), &whole = rel(rho, sigma);
        auto m = std::make_unique<QMatrix>(whole.graded_dim(p + q), outer.graded_dim(p) * inner.graded_dim(q));
        std::size_t nq = inner.graded_dim(q);
        for (std::size_t ix = 0; ix < outer.graded_dim(p); ix++) {
                QVector x = outer.ambient(outer.monomials(p)[ix]);
                for (std::size_t iy = 0; iy < nq; iy++) {
                        QVector y = inner.ambient(inner.monomials(q)[iy]);
                        auto z = whole.coordinates(p + q, ambient::wedge(x, y, n()));
                        if (!z)
                                throw std::logic_error("wedge leaves the relative exterior algebra");
                        for (std::size_t r = 0; r < z->size(); r++)
                                (*m)(r, ix * nq + iy) = (*z)[r];
                }
        }
        std::lock_guard<std::mutex> lock(mu_);
        auto &slot = wedge_[key];
        if (!slot)
                slot = std::move(m);
        return *slot;
}

const QMatrix &FanContext::compose_matrix(FaceId rho, FaceId tau, FaceId sigma, std::size_t p, std::size_t q) const
{
        Key key{rho, tau, sigma, p, q};
        {
                std::lock_guard<std::mutex> lock(mu_);
                auto it = compose_.find(key);
                if (it != compose_.end())
                        return *it->second;
        }
        /* invert the full degree-k wedge isomorphism, then keep the (p,q) block */
        std::size_t k = p + q;
        std::size_t a = rel_dim(tau, sigma), b = rel_dim(rho, tau);
        std::size_t total = binomial(a + b, k);
        QMatrix full(total, total);
        std::size_t col = 0, block_start = 0, block_size = 0;
        for (std::size_t pp = 0; pp <= k; pp++) {
                std::size_t qq = k - pp;
                if (pp > a || qq > b)
                        continue;
                const QMatrix &w = wedge_matrix(rho, tau, sigma, pp, qq);
                if (pp == p) {
                        block_start = col;
                        block_size = w.cols();
                }
                for (std::size_t c = 0; c < w.cols(); c++, col++)
                        for (std::size_t r = 0; r < total; r++)
                                full(r, col) = w(r, c);
        }
        auto inv = inverse(full);
        if (!inv)
                throw std::logic_error("wedge map is not an isomorphism: Phi direct sum fails");
        auto m = std::make_unique<QMatrix>(total, block_size);
        for (std::size_t r = 0; r < total; r++)
                for (std::size_t c = 0; c < block_size; c++)
                        (*m)(r, c) = (*inv)(block_start + c, r);
        std::lock_guard<std::mutex> lock(mu_);
        auto &slot = compose_[key];
        if (!slot)
                slot = std::move(m);
        return *slot;
}

ContextPtr make_context(std::shared_ptr<const Fan> fan, Completion phi)
{
        return std::make_shared<const FanContext>(std::move(fan), std::move(phi));
}

ContextPtr make_context(const Fan &fan)
{
        auto f = std::make_shared<const Fan>(fan);
        return make_context(f, orthogonal_completion(*f));
}

std::vector<std::size_t> hom_space_dims(const FanContext &ctx, FaceId tau, FaceId sigma)
{
        if (!ctx.fan().leq(tau, sigma))
                return {};
        std::size_t d = ctx.rel_dim(tau, sigma);
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p <= d; p++)
                out.push_back(binomial(d, p));
        return out;
}

QVector kron(const QVector &a, const QVector &b)
{
        QVector out(a.size() * b.size());
        for (std::size_t i = 0; i < a.size(); i++)
                if (sgn(a[i]) != 0)
                        for (std::size_t j = 0; j < b.size(); j++)
                                out[i * b.size() + j] = a[i] * b[j];
        return out;
}

ExtDual compose_hom(const FanContext &ctx, FaceId rho, FaceId tau, FaceId sigma, const ExtDual &f, const ExtDual &g)
{
        const Fan &fan = ctx.fan();
        std::size_t k = f.degree + g.degree;
        if (!fan.leq(rho, tau) || !fan.leq(tau, sigma))
                return {k, {}};
        const QMatrix &c = ctx.compose_matrix(rho, tau, sigma, f.degree, g.degree);
        return {k, c * kron(f.coeffs, g.coeffs)};
}

} // namespace kdual
