#include "kdual/equivariant.hpp"
#include "kdual/perverse.hpp"

#include <cstdlib>
#include <functional>
#include <mutex>

namespace kdual {

Poly Poly::constant(std::size_t nvars, Rational c)
{
        Poly p;
        p.nvars = nvars;
        if (sgn(c) != 0)
                p.terms[Exponent(nvars, 0)] = c;
        return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t i)
{
        Poly p;
        p.nvars = nvars;
        Exponent e(nvars, 0);
        e[i] = 1;
        p.terms[e] = 1;
        return p;
}

Poly Poly::operator*(const Poly &o) const
{
        Poly out;
        out.nvars = nvars;
        for (auto &[a, ca] : terms)
                for (auto &[b, cb] : o.terms) {
                        Exponent e(nvars);
                        for (std::size_t i = 0; i < nvars; i++)
                                e[i] = a[i] + b[i];
                        Rational &slot = out.terms[e];
                        slot += ca * cb;
                        if (sgn(slot) == 0)
                                out.terms.erase(e);
                }
        return out;
}

Poly &Poly::operator+=(const Poly &o)
{
        for (auto &[e, c] : o.terms) {
                Rational &slot = terms[e];
                slot += c;
                if (sgn(slot) == 0)
                        terms.erase(e);
        }
        return *this;
}

namespace {

struct MonomialTable {
        std::vector<Exponent> list;
        std::map<Exponent, std::size_t> index;
};

const MonomialTable &monomial_table(std::size_t d, std::size_t k)
{
        static std::mutex mu;
        static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<MonomialTable>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto &slot = cache[{d, k}];
        if (!slot) {
                slot = std::make_unique<MonomialTable>();
                Exponent e(d, 0);
                std::function<void(std::size_t, std::size_t)> go = [&](std::size_t pos, std::size_t left) {
                        if (d == 0) {
                                if (left == 0)
                                        slot->list.push_back(e);
                                return;
                        }
                        if (pos == d - 1) {
                                e[pos] = static_cast<unsigned>(left);
                                slot->list.push_back(e);
                                return;
                        }
                        for (std::size_t a = left + 1; a-- > 0;) {
                                e[pos] = static_cast<unsigned>(a);
                                go(pos + 1, left - a);
                        }
                };
                go(0, k);
                for (std::size_t i = 0; i < slot->list.size(); i++)
                        slot->index[slot->list[i]] = i;
        }
        return *slot;
}

std::size_t count_monomials(std::size_t d, int twice_k)
{
        if (twice_k < 0 || twice_k % 2 != 0)
                return 0;
        return monomial_table(d, static_cast<std::size_t>(twice_k / 2)).list.size();
}

/* Basis of the degree-D piece of a free module: (generator, monomial) pairs. */
struct Piece {
        std::vector<std::size_t> offset; /* per generator; SIZE_MAX if absent */
        std::size_t total = 0;
};

Piece piece(const std::vector<int> &gens, std::size_t d, int D)
{
        Piece p;
        for (int e : gens) {
                std::size_t c = count_monomials(d, D - e);
                p.offset.push_back(c ? p.total : SIZE_MAX);
                p.total += c;
        }
        return p;
}

class Builder {
public:
        Builder(const ASheaf &l) : l_(l), fan_(*l.fan) {}

        /* Coordinates of V_rho basis vectors in the V_sigma basis: y_i -> sum_k C(i,k) z_k. */
        const std::vector<Poly> &linear_forms(FaceId sigma, FaceId rho)
        {
                auto &slot = forms_[{sigma, rho}];
                if (!slot.empty() || fan_.face(sigma).dim == 0)
                        return slot;
                const Cone &s = fan_.face(sigma), &r = fan_.face(rho);
                QMatrix bt = s.span_basis.transpose();
                std::vector<Poly> out(s.dim, Poly::constant(r.dim, 0));
                for (std::size_t k = 0; k < r.dim; k++) {
                        auto c = solve(bt, r.span_basis.row(k));
                        if (!c)
                                throw EquivariantError("NotAFace", "span not contained");
                        for (std::size_t i = 0; i < s.dim; i++)
                                if (sgn((*c)[i]) != 0) {
                                        Poly t = Poly::variable(r.dim, k);
                                        t.terms.begin()->second = (*c)[i];
                                        out[i] += t;
                                }
                }
                slot = out;
                return slot;
        }

        Poly substitute(FaceId sigma, FaceId rho, const Exponent &e)
        {
                const auto &forms = linear_forms(sigma, rho);
                Poly p = Poly::constant(fan_.face(rho).dim, 1);
                for (std::size_t i = 0; i < e.size(); i++)
                        for (unsigned a = 0; a < e[i]; a++)
                                p = p * forms[i];
                return p;
        }

        void write(const Poly &p, std::size_t d, int D, int gen_deg, std::size_t offset, QMatrix &m, std::size_t col)
        {
                const auto &tab = monomial_table(d, static_cast<std::size_t>((D - gen_deg) / 2));
                for (auto &[e, c] : p.terms)
                        m(offset + tab.index.at(e), col) += c;
        }

        /* L_sigma,D -> L_rho,D */
        QMatrix restriction(FaceId sigma, FaceId rho, int D)
        {
                const auto &gs = l_.gen_degrees[sigma], &gr = l_.gen_degrees[rho];
                std::size_t ds = fan_.face(sigma).dim, dr = fan_.face(rho).dim;
                Piece ps = piece(gs, ds, D), pr = piece(gr, dr, D);
                QMatrix m(pr.total, ps.total);
                if (!ps.total || !pr.total)
                        return m;
                const auto &res = l_.restriction.at({sigma, rho});
                for (std::size_t j = 0; j < gs.size(); j++) {
                        if (ps.offset[j] == SIZE_MAX)
                                continue;
                        const auto &mons = monomial_table(ds, static_cast<std::size_t>((D - gs[j]) / 2)).list;
                        for (std::size_t a = 0; a < mons.size(); a++) {
                                Poly sub = substitute(sigma, rho, mons[a]);
                                for (std::size_t k = 0; k < gr.size(); k++) {
                                        if (pr.offset[k] == SIZE_MAX || res[j][k].is_zero())
                                                continue;
                                        write(sub * res[j][k], dr, D, gr[k], pr.offset[k], m, ps.offset[j] + a);
                                }
                        }
                }
                return m;
        }

        /* multiplication by a linear form of rho: L_rho,D-2 -> L_rho,D */
        QMatrix multiply(FaceId rho, const Poly &form, int D)
        {
                const auto &g = l_.gen_degrees[rho];
                std::size_t d = fan_.face(rho).dim;
                Piece from = piece(g, d, D - 2), to = piece(g, d, D);
                QMatrix m(to.total, from.total);
                for (std::size_t j = 0; j < g.size(); j++) {
                        if (from.offset[j] == SIZE_MAX)
                                continue;
                        const auto &mons = monomial_table(d, static_cast<std::size_t>((D - 2 - g[j]) / 2)).list;
                        for (std::size_t a = 0; a < mons.size(); a++) {
                                Poly p;
                                p.nvars = d;
                                p.terms[mons[a]] = 1;
                                write(p * form, d, D, g[j], to.offset[j], m, from.offset[j] + a);
                        }
                }
                return m;
        }

private:
        const ASheaf &l_;
        const Fan &fan_;
        std::map<std::pair<FaceId, FaceId>, std::vector<Poly>> forms_;
};

std::vector<FaceId> boundary_in_star(const ASheaf &l, FaceId sigma)
{
        std::vector<FaceId> out;
        for (FaceId r = 0; r < l.fan->size(); r++)
                if (r != sigma && l.support[r] && l.fan->leq(r, sigma))
                        out.push_back(r);
        return out;
}

int upper_wall(const Fan &fan, FaceId sigma, int extra)
{
        return -static_cast<int>(fan.codim(sigma)) + 2 * static_cast<int>(fan.ambient_dim()) + extra;
}

QMatrix stack_columns(const std::vector<QVector> &cols, std::size_t rows)
{
        QMatrix m(rows, cols.size());
        for (std::size_t c = 0; c < cols.size(); c++)
                for (std::size_t r = 0; r < rows; r++)
                        m(r, c) = cols[c][r];
        return m;
}

/* Indices of a basis complement (in K-coordinates) to the span of the given coordinate rows. */
std::vector<std::size_t> complement_indices(const std::vector<QVector> &rows, std::size_t dim)
{
        std::vector<bool> pivot(dim, false);
        if (!rows.empty()) {
                Echelon e = rref(QMatrix::from_rows(rows, dim));
                for (auto p : e.pivots)
                        pivot[p] = true;
        }
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < dim; j++)
                if (!pivot[j])
                        out.push_back(j);
        return out;
}

} // namespace

const std::vector<Exponent> &poly_monomials(std::size_t d, std::size_t k)
{
        return monomial_table(d, k).list;
}

int degree_window_extra()
{
        const char *s = std::getenv("KOSZUL_DEGREE_WINDOW");
        if (!s || !*s)
                return 0;
        char *end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (*end || v < 0 || v > 64)
                throw EquivariantError("BadWindow", "KOSZUL_DEGREE_WINDOW must be an integer in [0, 64]");
        return static_cast<int>(v);
}

ASheaf minimal_extension_sheaf(std::shared_ptr<const Fan> fanp, FaceId tau, int window_extra)
{
        const Fan &fan = *fanp;
        ASheaf l;
        l.fan = fanp;
        l.tau = tau;
        l.window_extra = window_extra;
        l.support.assign(fan.size(), false);
        l.gen_degrees.assign(fan.size(), {});
        for (FaceId f = 0; f < fan.size(); f++)
                l.support[f] = fan.leq(tau, f);
        int ctau = static_cast<int>(fan.codim(tau));
        l.gen_degrees[tau] = {-ctau};
        l.restriction[{tau, tau}] = {{Poly::constant(fan.face(tau).dim, 1)}};

        std::vector<FaceId> order;
        for (FaceId f = 0; f < fan.size(); f++)
                if (l.support[f] && f != tau)
                        order.push_back(f);
        std::stable_sort(order.begin(), order.end(), [&](FaceId a, FaceId b) { return fan.face(a).dim < fan.face(b).dim; });

        Builder b(l);
        for (FaceId sigma : order) {
                std::vector<FaceId> bd = boundary_in_star(l, sigma);
                std::size_t ds = fan.face(sigma).dim;
                int hi = upper_wall(fan, sigma, window_extra);
                std::vector<std::pair<FaceId, FaceId>> covers;
                for (FaceId r : bd)
                        for (FaceId r2 : bd)
                                if (r != r2 && fan.leq(r2, r) && fan.face(r2).dim + 1 == fan.face(r).dim)
                                        covers.push_back({r, r2});
                std::vector<int> gens;
                std::vector<std::map<FaceId, QVector>> gen_sections;
                std::map<FaceId, Piece> prev_pieces;
                QMatrix prev_k;
                std::map<FaceId, std::size_t> prev_off;
                for (int D = -ctau; D <= hi; D += 2) {
                        std::map<FaceId, std::size_t> off;
                        std::size_t total = 0;
                        for (FaceId r : bd) {
                                off[r] = total;
                                total += piece(l.gen_degrees[r], fan.face(r).dim, D).total;
                        }
                        QMatrix k;
                        if (covers.empty()) {
                                k = QMatrix::identity(total);
                        } else {
                                std::vector<QVector> rows;
                                for (auto [r, r2] : covers) {
                                        QMatrix res = b.restriction(r, r2, D);
                                        for (std::size_t i = 0; i < res.rows(); i++) {
                                                QVector row(total);
                                                for (std::size_t c = 0; c < res.cols(); c++)
                                                        row[off[r] + c] = res(i, c);
                                                row[off[r2] + i] -= 1;
                                                rows.push_back(row);
                                        }
                                }
                                k = rows.empty() ? QMatrix::identity(total) : kernel_basis(QMatrix::from_rows(rows, total));
                        }
                        std::vector<QVector> image_coords;
                        if (prev_k.cols() && k.cols()) {
                                for (std::size_t i = 0; i < ds; i++) {
                                        std::vector<QMatrix> mul;
                                        for (FaceId r : bd)
                                                mul.push_back(b.multiply(r, b.linear_forms(sigma, r)[i], D));
                                        for (std::size_t c = 0; c < prev_k.cols(); c++) {
                                                QVector img(total);
                                                for (std::size_t ri = 0; ri < bd.size(); ri++) {
                                                        FaceId r = bd[ri];
                                                        const QMatrix &m = mul[ri];
                                                        for (std::size_t a = 0; a < m.rows(); a++)
                                                                for (std::size_t bb = 0; bb < m.cols(); bb++)
                                                                        if (sgn(m(a, bb)) != 0)
                                                                                img[off[r] + a] += m(a, bb) * prev_k(prev_off[r] + bb, c);
                                                }
                                                auto coords = solve(k, img);
                                                if (!coords)
                                                        throw EquivariantError("InternalError", "product leaves the section space");
                                                image_coords.push_back(*coords);
                                        }
                                }
                        }
                        for (auto j : complement_indices(image_coords, k.cols())) {
                                if (D > -static_cast<int>(fan.codim(sigma)) - 1)
                                        throw EquivariantError("DegreeWindowViolation",
                                                               "generator above the Hard Lefschetz wall");
                                gens.push_back(D);
                                std::map<FaceId, QVector> sec;
                                for (FaceId r : bd) {
                                        std::size_t sz = piece(l.gen_degrees[r], fan.face(r).dim, D).total;
                                        QVector v(sz);
                                        for (std::size_t a = 0; a < sz; a++)
                                                v[a] = k(off[r] + a, j);
                                        sec[r] = v;
                                }
                                gen_sections.push_back(sec);
                        }
                        prev_k = k;
                        prev_off = off;
                }
                l.gen_degrees[sigma] = gens;
                for (FaceId r : bd) {
                        const auto &gr = l.gen_degrees[r];
                        std::size_t dr = fan.face(r).dim;
                        std::vector<std::vector<Poly>> mat(gens.size(), std::vector<Poly>(gr.size(), Poly::constant(dr, 0)));
                        for (std::size_t j = 0; j < gens.size(); j++) {
                                Piece pr = piece(gr, dr, gens[j]);
                                const QVector &v = gen_sections[j][r];
                                for (std::size_t kk = 0; kk < gr.size(); kk++) {
                                        if (pr.offset[kk] == SIZE_MAX)
                                                continue;
                                        const auto &mons =
                                            monomial_table(dr, static_cast<std::size_t>((gens[j] - gr[kk]) / 2)).list;
                                        for (std::size_t a = 0; a < mons.size(); a++)
                                                if (sgn(v[pr.offset[kk] + a]) != 0)
                                                        mat[j][kk].terms[mons[a]] = v[pr.offset[kk] + a];
                                }
                        }
                        l.restriction[{sigma, r}] = std::move(mat);
                }
                std::vector<std::vector<Poly>> id(gens.size(), std::vector<Poly>(gens.size(), Poly::constant(ds, 0)));
                for (std::size_t j = 0; j < gens.size(); j++)
                        id[j][j] = Poly::constant(ds, 1);
                l.restriction[{sigma, sigma}] = std::move(id);
        }
        return l;
}

LocalIC local_ic_dims(const ASheaf &l, FaceId sigma)
{
        const Fan &fan = *l.fan;
        if (!l.support.at(sigma))
                return {};
        LocalIC out;
        const auto &gens = l.gen_degrees[sigma];
        for (int e : gens)
                out.stalk[e]++;
        std::vector<FaceId> bd = boundary_in_star(l, sigma);
        std::size_t ds = fan.face(sigma).dim;
        Builder b(l);
        int lo = gens.empty() ? 0 : *std::min_element(gens.begin(), gens.end());
        int hi = upper_wall(fan, sigma, l.window_extra);
        std::vector<Poly> vars;
        for (std::size_t i = 0; i < ds; i++)
                vars.push_back(Poly::variable(ds, i));
        QMatrix prev_k;
        std::size_t found = 0;
        std::map<int, std::size_t> kernel_dims;
        int D = lo;
        for (; D <= hi && found < gens.size(); D += 2) {
                std::size_t total = piece(gens, ds, D).total;
                QMatrix k;
                if (bd.empty()) {
                        k = QMatrix::identity(total);
                } else {
                        std::vector<QVector> rows;
                        for (FaceId r : bd) {
                                QMatrix res = b.restriction(sigma, r, D);
                                for (std::size_t i = 0; i < res.rows(); i++)
                                        rows.push_back(res.row(i));
                        }
                        k = rows.empty() ? QMatrix::identity(total) : kernel_basis(QMatrix::from_rows(rows, total));
                }
                kernel_dims[D] = k.cols();
                std::vector<QVector> image;
                if (prev_k.cols() && k.cols())
                        for (auto &y : vars) {
                                QMatrix m = b.multiply(sigma, y, D) * prev_k;
                                for (std::size_t c = 0; c < m.cols(); c++)
                                        image.push_back(m.column(c));
                        }
                std::size_t r = image.empty() ? 0 : rank(stack_columns(image, total));
                if (k.cols() > r) {
                        out.costalk[D] = k.cols() - r;
                        found += k.cols() - r;
                }
                prev_k = k;
        }
        if (found != gens.size())
                throw EquivariantError("DegreeWindowViolation", "costalk generators not found inside the degree window");
        for (auto [deg, dim] : kernel_dims) {
                std::size_t expect = 0;
                for (auto [f, c] : out.costalk)
                        expect += c * count_monomials(ds, deg - f);
                if (expect != dim)
                        throw EquivariantError("NotFree", "relative sections are not free on the found generators");
        }
        return out;
}

std::vector<long long> h_interval(const Fan &fan, FaceId tau, FaceId sigma)
{
        std::size_t r = fan.face(sigma).dim - fan.face(tau).dim;
        if (r == 0)
                return {1};
        std::vector<long long> h(r, 0);
        for (FaceId g = 0; g < fan.size(); g++) {
                if (g == sigma || !fan.leq(tau, g) || !fan.leq(g, sigma))
                        continue;
                std::vector<long long> poly = g_interval(fan, tau, g);
                std::size_t e = r - 1 - (fan.face(g).dim - fan.face(tau).dim);
                for (std::size_t k = 0; k < e; k++) {
                        std::vector<long long> next(poly.size() + 1, 0);
                        for (std::size_t i = 0; i < poly.size(); i++) {
                                next[i + 1] += poly[i];
                                next[i] -= poly[i];
                        }
                        poly = next;
                }
                for (std::size_t i = 0; i < poly.size() && i < r; i++)
                        h[i] += poly[i];
        }
        return h;
}

std::vector<long long> g_interval(const Fan &fan, FaceId tau, FaceId sigma)
{
        std::size_t r = fan.face(sigma).dim - fan.face(tau).dim;
        if (r == 0)
                return {1};
        std::vector<long long> h = h_interval(fan, tau, sigma);
        std::vector<long long> g;
        for (std::size_t i = 0; i <= (r - 1) / 2; i++)
                g.push_back(h[i] - (i ? h[i - 1] : 0));
        return g;
}

std::vector<long long> g_oracle(const Fan &cone_fan)
{
        return g_interval(cone_fan, cone_fan.zero_face(), cone_fan.top());
}

std::map<FaceId, Prediction> h_transfer(const ASheaf &l)
{
        std::map<FaceId, Prediction> out;
        for (FaceId s = 0; s < l.fan->size(); s++) {
                if (!l.support[s])
                        continue;
                LocalIC ic = local_ic_dims(l, s);
                Prediction p;
                for (auto [d, k] : ic.stalk)
                        p.stalk[{d, d}] = k;
                for (auto [d, k] : ic.costalk)
                        p.costalk[{d, d}] = k;
                out[s] = p;
        }
        return out;
}

bool is_diagonal(const BigradedDims &d)
{
        for (auto &[deg, k] : d)
                if (k && deg.u != deg.v)
                        return false;
        return true;
}

bool PurityReport::passed() const
{
        for (auto &i : items)
                if (!i.diagonal || !i.matches)
                        return false;
        return true;
}

PurityReport crosscheck_purity(const ContextPtr &ctx, FaceId tau)
{
        const Fan &fan = ctx->fan();
        InjComplex l = simple(ctx, tau).complex;
        ASheaf sheaf = minimal_extension_sheaf(ctx->fan_ptr(), tau);
        auto pred = h_transfer(sheaf);
        PurityReport rep;
        rep.tau = tau;
        for (FaceId s = 0; s < fan.size(); s++) {
                PurityItem it;
                it.sigma = s;
                it.stalk = gamma_stalk(l, s);
                it.costalk = gamma_costalk(l, s);
                it.diagonal = is_diagonal(it.stalk) && is_diagonal(it.costalk);
                if (auto p = pred.find(s); p != pred.end())
                        it.expected = p->second;
                it.matches = it.stalk == it.expected.stalk && it.costalk == it.expected.costalk;
                rep.items.push_back(it);
        }
        return rep;
}

} // namespace kdual
