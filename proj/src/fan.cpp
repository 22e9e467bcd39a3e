#include "kdual/fan.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace kdual {

namespace {

bool lex_less(const QVector &a, const QVector &b)
{
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t> &)> &fn)
{
        std::vector<std::size_t> idx(k);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
                if (pos == k) {
                        fn(idx);
                        return;
                }
                for (std::size_t i = start; i + (k - pos) <= n; i++) {
                        idx[pos] = i;
                        rec(pos + 1, i + 1);
                }
        };
        rec(0, 0);
}

/* Coordinates of v in the row basis b (v must lie in the span). */
QVector coordinates(const QMatrix &b, const QVector &v)
{
        auto x = solve(b.transpose(), v);
        if (!x)
                throw FanError("vector outside the expected span");
        return *x;
}

/*
 * Facet normals of the full-dimensional cone generated by gens in Q^k,
 * found by testing every hyperplane through k-1 generators.
 */
std::vector<QVector> facet_normals(const std::vector<QVector> &gens, std::size_t k)
{
        std::vector<QVector> normals;
        auto consider = [&](QVector nu) {
                int pos = 0, neg = 0;
                for (const auto &g : gens) {
                        int s = sgn(dot(nu, g));
                        pos += s > 0;
                        neg += s < 0;
                }
                if (pos && neg)
                        return;
                if (neg)
                        for (auto &x : nu)
                                x = -x;
                nu = primitive_integer(nu);
                if (std::find(normals.begin(), normals.end(), nu) == normals.end())
                        normals.push_back(nu);
        };
        if (k == 1) {
                consider(QVector{Rational(1)});
        } else {
                for_each_subset(gens.size(), k - 1, [&](const std::vector<std::size_t> &sub) {
                        std::vector<QVector> rows;
                        for (auto i : sub)
                                rows.push_back(gens[i]);
                        QMatrix m = QMatrix::from_rows(rows, k);
                        QMatrix ker = kernel_basis(m);
                        if (ker.cols() == 1)
                                consider(ker.column(0));
                });
        }
        if (normals.empty() || rank(QMatrix::from_rows(normals, k)) < k)
                throw FanError("NotPointed: cone contains a line");
        std::sort(normals.begin(), normals.end(), lex_less);
        return normals;
}

struct LocalFace {
        std::vector<QVector> rays; /* primitive, sorted */
        QVector support;
};

struct LocalCone {
        std::vector<LocalFace> faces;
        std::vector<QVector> inequalities; /* lifted facet normals */
        std::vector<QVector> equations;    /* annihilator of the span */
};

/* All faces of the cone generated by gens in Q^n, described by primitive ray vectors. */
LocalCone local_faces(std::vector<QVector> gens, std::size_t n)
{
        std::vector<QVector> prim;
        for (auto &g : gens) {
                if (g.size() != n)
                        throw FanError("generator has wrong ambient dimension");
                if (is_zero(g))
                        continue;
                QVector p = primitive_integer(g);
                if (std::find(prim.begin(), prim.end(), p) == prim.end())
                        prim.push_back(p);
        }
        std::sort(prim.begin(), prim.end(), lex_less);
        LocalCone out;
        if (prim.empty()) {
                out.faces.push_back({{}, QVector(n)});
                for (std::size_t i = 0; i < n; i++) {
                        QVector e(n);
                        e[i] = 1;
                        out.equations.push_back(e);
                }
                return out;
        }
        QMatrix span = canonical_subspace_basis(prim, n);
        QMatrix ann = annihilator(span, n);
        for (std::size_t r = 0; r < ann.rows(); r++)
                out.equations.push_back(ann.row(r));
        std::size_t k = span.rows();
        std::vector<QVector> coords;
        for (auto &g : prim)
                coords.push_back(coordinates(span, g));
        std::vector<QVector> normals = facet_normals(coords, k);

        /* lift each normal to V*: xi(b_i) = nu_i on the span basis */
        std::vector<QVector> lifted;
        for (auto &nu : normals) {
                auto xi = solve(span, nu);
                lifted.push_back(primitive_integer(*xi));
        }
        out.inequalities = lifted;

        using Mask = std::vector<bool>;
        std::set<Mask> masks;
        std::vector<Mask> facet_masks;
        for (auto &nu : normals) {
                Mask m(prim.size());
                for (std::size_t i = 0; i < prim.size(); i++)
                        m[i] = sgn(dot(nu, coords[i])) == 0;
                facet_masks.push_back(m);
                masks.insert(m);
        }
        masks.insert(Mask(prim.size(), true));
        bool grew = true;
        while (grew) {
                grew = false;
                std::vector<Mask> cur(masks.begin(), masks.end());
                for (std::size_t a = 0; a < cur.size(); a++)
                        for (std::size_t b = a + 1; b < cur.size(); b++) {
                                Mask m(prim.size());
                                for (std::size_t i = 0; i < prim.size(); i++)
                                        m[i] = cur[a][i] && cur[b][i];
                                if (masks.insert(m).second)
                                        grew = true;
                        }
        }

        /* extreme rays are the one-dimensional faces */
        std::vector<bool> extreme(prim.size(), false);
        for (auto &m : masks) {
                std::vector<QVector> g;
                for (std::size_t i = 0; i < prim.size(); i++)
                        if (m[i])
                                g.push_back(prim[i]);
                if (!g.empty() && rank(QMatrix::from_rows(g, n)) == 1)
                        for (std::size_t i = 0; i < prim.size(); i++)
                                if (m[i])
                                        extreme[i] = true;
        }
        for (auto &m : masks) {
                LocalFace f;
                for (std::size_t i = 0; i < prim.size(); i++)
                        if (m[i] && extreme[i])
                                f.rays.push_back(prim[i]);
                f.support = QVector(n);
                for (std::size_t j = 0; j < normals.size(); j++) {
                        bool contains = true;
                        for (std::size_t i = 0; i < prim.size(); i++)
                                if (m[i] && !facet_masks[j][i])
                                        contains = false;
                        if (contains)
                                for (std::size_t c = 0; c < n; c++)
                                        f.support[c] += lifted[j][c];
                }
                out.faces.push_back(f);
        }
        return out;
}

/* Extreme rays of {x : A x >= 0, E x = 0}, assumed pointed. */
std::vector<QVector> extreme_rays(const std::vector<QVector> &ineq, const std::vector<QVector> &eq, std::size_t n)
{
        QMatrix kb = eq.empty() ? QMatrix::identity(n) : kernel_basis(QMatrix::from_rows(eq, n));
        std::size_t m = kb.cols();
        std::vector<QVector> rays;
        if (m == 0)
                return rays;
        std::vector<QVector> a;
        for (auto &row : ineq) {
                QVector r(m);
                for (std::size_t j = 0; j < m; j++)
                        for (std::size_t c = 0; c < n; c++)
                                r[j] += row[c] * kb(c, j);
                a.push_back(r);
        }
        auto test = [&](const QVector &y) {
                for (int s : {1, -1}) {
                        bool ok = true;
                        for (auto &r : a)
                                if (sgn(dot(r, y)) * s < 0)
                                        ok = false;
                        if (!ok)
                                continue;
                        QVector x(n);
                        for (std::size_t c = 0; c < n; c++)
                                for (std::size_t j = 0; j < m; j++)
                                        x[c] += kb(c, j) * y[j] * s;
                        x = primitive_integer(x);
                        if (std::find(rays.begin(), rays.end(), x) == rays.end())
                                rays.push_back(x);
                }
        };
        if (m == 1) {
                test(QVector{Rational(1)});
        } else {
                for_each_subset(a.size(), m - 1, [&](const std::vector<std::size_t> &sub) {
                        std::vector<QVector> rows;
                        for (auto i : sub)
                                rows.push_back(a[i]);
                        QMatrix ker = kernel_basis(QMatrix::from_rows(rows, m));
                        if (ker.cols() == 1)
                                test(ker.column(0));
                });
        }
        /* a ray both ways means a line: not pointed, which fan cones never are */
        std::sort(rays.begin(), rays.end(), lex_less);
        return rays;
}

} // namespace

QMatrix annihilator(const QMatrix &rows, std::size_t n)
{
        if (rows.rows() == 0)
                return QMatrix::identity(n);
        QMatrix k = kernel_basis(rows);
        return canonical_subspace_basis(k.transpose());
}

QMatrix intersect_spans(const QMatrix &a, const QMatrix &b, std::size_t n)
{
        if (a.rows() == 0 || b.rows() == 0)
                return QMatrix(0, n);
        QMatrix m(n, a.rows() + b.rows());
        for (std::size_t c = 0; c < n; c++) {
                for (std::size_t i = 0; i < a.rows(); i++)
                        m(c, i) = a(i, c);
                for (std::size_t i = 0; i < b.rows(); i++)
                        m(c, a.rows() + i) = -b(i, c);
        }
        QMatrix k = kernel_basis(m);
        std::vector<QVector> vecs;
        for (std::size_t j = 0; j < k.cols(); j++) {
                QVector x(n);
                for (std::size_t i = 0; i < a.rows(); i++)
                        for (std::size_t c = 0; c < n; c++)
                                x[c] += k(i, j) * a(i, c);
                vecs.push_back(x);
        }
        return canonical_subspace_basis(vecs, n);
}

FaceId Fan::top() const
{
        auto m = maximal();
        if (m.size() != 1)
                throw FanError("fan has no unique maximal cone");
        return m[0];
}

std::vector<FaceId> Fan::maximal() const
{
        std::vector<FaceId> out;
        for (FaceId f = 0; f < faces_.size(); f++) {
                bool is_max = true;
                for (FaceId g = 0; g < faces_.size(); g++)
                        if (g != f && leq(f, g))
                                is_max = false;
                if (is_max)
                        out.push_back(f);
        }
        return out;
}

std::vector<std::size_t> Fan::counts_by_dim() const
{
        std::size_t top_dim = 0;
        for (auto &f : faces_)
                top_dim = std::max(top_dim, f.dim);
        std::vector<std::size_t> c(top_dim + 1, 0);
        for (auto &f : faces_)
                c[f.dim]++;
        return c;
}

std::optional<FaceId> Fan::find(const std::vector<std::size_t> &ray_indices) const
{
        std::vector<std::size_t> key = ray_indices;
        std::sort(key.begin(), key.end());
        for (FaceId f = 0; f < faces_.size(); f++)
                if (faces_[f].rays == key)
                        return f;
        return std::nullopt;
}

std::optional<FaceId> Fan::find_by_vectors(const std::vector<QVector> &ray_vectors) const
{
        std::vector<std::size_t> idx;
        for (auto &v : ray_vectors) {
                QVector p = primitive_integer(v);
                auto it = std::find(rays_.begin(), rays_.end(), p);
                if (it == rays_.end())
                        return std::nullopt;
                idx.push_back(static_cast<std::size_t>(it - rays_.begin()));
        }
        return find(idx);
}

std::vector<FaceId> Fan::facets_of(FaceId f) const
{
        std::vector<FaceId> out;
        for (FaceId g = 0; g < faces_.size(); g++)
                if (g != f && leq(g, f) && faces_[g].dim + 1 == faces_[f].dim)
                        out.push_back(g);
        return out;
}

std::vector<QVector> Fan::ray_vectors(FaceId f) const
{
        std::vector<QVector> out;
        for (auto r : faces_.at(f).rays)
                out.push_back(rays_[r]);
        return out;
}

Fan build_fan(const std::vector<std::vector<QVector>> &cones, std::size_t n)
{
        std::vector<LocalCone> locals;
        std::vector<QVector> all_rays;
        for (auto &gens : cones) {
                locals.push_back(local_faces(gens, n));
                for (auto &lf : locals.back().faces)
                        for (auto &r : lf.rays)
                                if (std::find(all_rays.begin(), all_rays.end(), r) == all_rays.end())
                                        all_rays.push_back(r);
        }
        if (cones.empty())
                locals.push_back(local_faces({}, n));
        std::sort(all_rays.begin(), all_rays.end(), lex_less);
        auto index_of = [&](const QVector &r) {
                return static_cast<std::size_t>(std::find(all_rays.begin(), all_rays.end(), r) - all_rays.begin());
        };

        std::map<std::vector<std::size_t>, QVector> keyed;
        for (auto &lc : locals)
                for (auto &lf : lc.faces) {
                        std::vector<std::size_t> key;
                        for (auto &r : lf.rays)
                                key.push_back(index_of(r));
                        std::sort(key.begin(), key.end());
                        keyed.emplace(key, lf.support);
                }

        Fan fan;
        fan.n_ = n;
        fan.rays_ = all_rays;
        for (auto &[key, support] : keyed) {
                Cone c;
                c.ambient_dim = n;
                c.rays = key;
                std::vector<QVector> g;
                for (auto i : key)
                        g.push_back(all_rays[i]);
                c.span_basis = g.empty() ? QMatrix(0, n) : canonical_subspace_basis(g, n);
                c.dim = c.span_basis.rows();
                c.annihilator_basis = annihilator(c.span_basis, n);
                c.support = support;
                fan.faces_.push_back(std::move(c));
        }
        std::stable_sort(fan.faces_.begin(), fan.faces_.end(), [](const Cone &a, const Cone &b) {
                if (a.dim != b.dim)
                        return a.dim < b.dim;
                return a.rays < b.rays;
        });
        std::size_t m = fan.faces_.size();
        fan.leq_.assign(m * m, false);
        for (std::size_t a = 0; a < m; a++)
                for (std::size_t b = 0; b < m; b++)
                        fan.leq_[a * m + b] = std::includes(fan.faces_[b].rays.begin(), fan.faces_[b].rays.end(),
                                                            fan.faces_[a].rays.begin(), fan.faces_[a].rays.end());

        /* pairwise intersections of the input cones must be common faces */
        for (std::size_t x = 0; x < cones.size(); x++)
                for (std::size_t y = x + 1; y < cones.size(); y++) {
                        auto key_of = [&](const LocalCone &lc) {
                                std::vector<std::size_t> key;
                                for (auto &lf : lc.faces)
                                        for (auto &r : lf.rays)
                                                key.push_back(index_of(r));
                                std::sort(key.begin(), key.end());
                                key.erase(std::unique(key.begin(), key.end()), key.end());
                                return key;
                        };
                        auto ka = key_of(locals[x]), kb = key_of(locals[y]);
                        std::vector<std::size_t> common;
                        std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(common));
                        std::vector<QVector> expect;
                        for (auto i : common)
                                expect.push_back(all_rays[i]);
                        auto is_face_of = [&](const LocalCone &lc) {
                                for (auto &lf : lc.faces)
                                        if (lf.rays == expect)
                                                return true;
                                return false;
                        };
                        if (!is_face_of(locals[x]) || !is_face_of(locals[y]))
                                throw FanError("common rays of two cones do not span a common face");
                        std::vector<QVector> ineq = locals[x].inequalities, eq = locals[x].equations;
                        ineq.insert(ineq.end(), locals[y].inequalities.begin(), locals[y].inequalities.end());
                        eq.insert(eq.end(), locals[y].equations.begin(), locals[y].equations.end());
                        if (extreme_rays(ineq, eq, n) != expect)
                                throw FanError("two cones meet outside a common face");
                }
        return fan;
}

Fan face_lattice(const std::vector<QVector> &generators, std::size_t n)
{
        return build_fan({generators}, n);
}

DualCone dual_cone(const Fan &cone_fan)
{
        std::size_t n = cone_fan.ambient_dim();
        FaceId top = cone_fan.top();
        if (cone_fan.face(top).dim != n)
                throw FanError("NotFullDimensional: dual cone needs a full-dimensional cone");
        std::vector<QVector> normals;
        for (FaceId f : cone_fan.facets_of(top))
                normals.push_back(primitive_integer(cone_fan.face(f).support));
        DualCone out;
        out.dual = face_lattice(normals, n);
        out.perp.resize(cone_fan.size());
        for (FaceId t = 0; t < cone_fan.size(); t++) {
                std::vector<QVector> gens;
                for (FaceId f : cone_fan.facets_of(top))
                        if (cone_fan.leq(t, f))
                                gens.push_back(primitive_integer(cone_fan.face(f).support));
                auto d = out.dual.find_by_vectors(gens);
                if (!d)
                        throw FanError("perp face not found in the dual cone");
                out.perp[t] = *d;
        }
        return out;
}

QuasiFan::QuasiFan(std::shared_ptr<const Fan> fan, std::vector<bool> present)
    : fan_(std::move(fan)), present_(std::move(present))
{
        if (present_.size() != fan_->size())
                throw FanError("NotASubset: mask size mismatch");
}

QuasiFan QuasiFan::whole(std::shared_ptr<const Fan> fan)
{
        std::size_t m = fan->size();
        return QuasiFan(std::move(fan), std::vector<bool>(m, true));
}

std::vector<FaceId> QuasiFan::members() const
{
        std::vector<FaceId> out;
        for (FaceId f = 0; f < present_.size(); f++)
                if (present_[f])
                        out.push_back(f);
        return out;
}

bool QuasiFan::interval_closed() const
{
        for (FaceId a = 0; a < present_.size(); a++)
                for (FaceId c = 0; c < present_.size(); c++) {
                        if (!present_[a] || !present_[c] || !fan_->leq(a, c))
                                continue;
                        for (FaceId b = 0; b < present_.size(); b++)
                                if (fan_->leq(a, b) && fan_->leq(b, c) && !present_[b])
                                        return false;
                }
        return true;
}

SubsetInfo subfan_ops(const QuasiFan &delta, const std::vector<bool> &subset)
{
        const Fan &fan = delta.fan();
        std::size_t m = fan.size();
        if (subset.size() != m)
                throw FanError("NotASubset: mask size mismatch");
        for (FaceId f = 0; f < m; f++)
                if (subset[f] && !delta.contains(f))
                        throw FanError("NotASubset: cone outside the quasifan");
        SubsetInfo info;
        info.closure.assign(m, false);
        info.star.assign(m, false);
        for (FaceId s = 0; s < m; s++) {
                if (!subset[s])
                        continue;
                for (FaceId r = 0; r < m; r++) {
                        if (!delta.contains(r))
                                continue;
                        if (fan.leq(s, r))
                                info.closure[r] = true;
                        if (fan.leq(r, s))
                                info.star[r] = true;
                }
        }
        info.is_closed = info.closure == subset;
        info.is_open = info.star == subset;
        return info;
}

std::vector<bool> closure_of(const QuasiFan &delta, FaceId f)
{
        std::vector<bool> s(delta.fan().size(), false);
        s[f] = true;
        return subfan_ops(delta, s).closure;
}

std::vector<bool> faces_below(const QuasiFan &delta, FaceId f)
{
        std::vector<bool> s(delta.fan().size(), false);
        s[f] = true;
        return subfan_ops(delta, s).star;
}

std::vector<bool> boundary_of(const QuasiFan &delta, FaceId f)
{
        auto s = faces_below(delta, f);
        s[f] = false;
        return s;
}

Completion orthogonal_completion(const Fan &fan)
{
        std::vector<QMatrix> phi;
        for (auto &c : fan.faces())
                phi.push_back(c.dim == 0 ? QMatrix(0, fan.ambient_dim()) : canonical_subspace_basis(c.span_basis));
        return Completion(std::move(phi));
}

void validate_completion(const Fan &fan, const Completion &phi)
{
        std::size_t n = fan.ambient_dim();
        if (phi.size() != fan.size())
                throw FanError("InvalidCompletion: one subspace per face required");
        for (FaceId s = 0; s < fan.size(); s++) {
                const Cone &c = fan.face(s);
                const QMatrix &p = phi.phi(s);
                if (p.cols() != n || p.rows() != c.dim || rank(p) != c.dim)
                        throw FanError("InvalidCompletion: Phi has the wrong dimension at a face");
                QMatrix both(n, n);
                for (std::size_t r = 0; r < p.rows(); r++)
                        for (std::size_t k = 0; k < n; k++)
                                both(r, k) = p(r, k);
                for (std::size_t r = 0; r < c.annihilator_basis.rows(); r++)
                        for (std::size_t k = 0; k < n; k++)
                                both(p.rows() + r, k) = c.annihilator_basis(r, k);
                if (rank(both) != n)
                        throw FanError("InvalidCompletion: Phi does not complement the annihilator");
        }
        for (FaceId t = 0; t < fan.size(); t++)
                for (FaceId s = 0; s < fan.size(); s++)
                        if (fan.leq(t, s) && intersect_spans(phi.phi(t), phi.phi(s), n).rows() != phi.phi(t).rows())
                                throw FanError("InvalidCompletion: Phi is not increasing along faces");
}

Completion dual_completion(const Fan &cone_fan, const Completion &phi, const DualCone &dual)
{
        std::size_t n = cone_fan.ambient_dim();
        std::vector<QMatrix> out(dual.dual.size());
        for (FaceId t = 0; t < cone_fan.size(); t++)
                out[dual.perp[t]] = annihilator(phi.phi(t), n);
        Completion c(std::move(out));
        try {
                validate_completion(dual.dual, c);
        } catch (const FanError &e) {
                throw FanError(std::string("InvalidCompletion on the dual: ") + e.what());
        }
        return c;
}

QMatrix relative_phi(const Fan &fan, const Completion &phi, FaceId tau, FaceId sigma)
{
        std::size_t n = fan.ambient_dim();
        return intersect_spans(fan.face(tau).annihilator_basis, phi.phi(sigma), n);
}

} // namespace kdual
