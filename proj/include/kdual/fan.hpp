#pragma once

#include "kdual/exactlin.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdual {

using FaceId = std::size_t;

struct FanError : std::runtime_error {
        using std::runtime_error::runtime_error;
};

/* A face of the fan: a pointed cone spanned by some of the fan's rays. */
struct Cone {
        std::size_t ambient_dim = 0;
        std::vector<std::size_t> rays; /* sorted indices into Fan::rays() */
        std::size_t dim = 0;
        QMatrix span_basis;        /* canonical basis of V_sigma, dim x n */
        QMatrix annihilator_basis; /* canonical basis of V_sigma^perp in V*, (n - dim) x n */
        QVector support;           /* xi >= 0 on a maximal cone containing it, zero exactly here */
};

/*
 * A fan closed under faces.  Faces are ordered by (dim, ray index set),
 * which is also the linear extension used by default everywhere.
 */
class Fan {
public:
        Fan() = default;

        std::size_t ambient_dim() const { return n_; }
        const std::vector<QVector> &rays() const { return rays_; }
        const std::vector<Cone> &faces() const { return faces_; }
        const Cone &face(FaceId f) const { return faces_.at(f); }
        std::size_t size() const { return faces_.size(); }
        const std::string &name() const { return name_; }
        void set_name(std::string s) { name_ = std::move(s); }

        /* tau is a face of sigma (reflexive). */
        bool leq(FaceId tau, FaceId sigma) const { return leq_[tau * faces_.size() + sigma]; }
        std::size_t codim(FaceId f) const { return n_ - faces_[f].dim; }
        FaceId zero_face() const { return 0; }
        FaceId top() const; /* unique maximal face, throws if several */
        std::vector<FaceId> maximal() const;
        std::vector<std::size_t> counts_by_dim() const;
        std::optional<FaceId> find(const std::vector<std::size_t> &ray_indices) const;
        std::optional<FaceId> find_by_vectors(const std::vector<QVector> &ray_vectors) const;
        std::vector<FaceId> facets_of(FaceId f) const; /* faces of dimension dim f - 1 */
        std::vector<QVector> ray_vectors(FaceId f) const;

        friend Fan build_fan(const std::vector<std::vector<QVector>> &cones, std::size_t n);

private:
        std::size_t n_ = 0;
        std::string name_;
        std::vector<QVector> rays_;
        std::vector<Cone> faces_;
        std::vector<bool> leq_;
};

/* Face lattice of one cone; NotPointed is reported as FanError. */
Fan face_lattice(const std::vector<QVector> &generators, std::size_t n);
/* Fan from its maximal cones; faces completed, pairwise intersections checked. */
Fan build_fan(const std::vector<std::vector<QVector>> &cones, std::size_t n);

struct DualCone {
        Fan dual;
        std::vector<FaceId> perp; /* face of sigma -> face of sigma dual */
};

DualCone dual_cone(const Fan &cone_fan);

/* A subset of faces of a fan; quasifans are the interval-closed ones. */
class QuasiFan {
public:
        QuasiFan() = default;
        QuasiFan(std::shared_ptr<const Fan> fan, std::vector<bool> present);
        static QuasiFan whole(std::shared_ptr<const Fan> fan);

        const Fan &fan() const { return *fan_; }
        std::shared_ptr<const Fan> fan_ptr() const { return fan_; }
        bool contains(FaceId f) const { return present_.at(f); }
        const std::vector<bool> &mask() const { return present_; }
        std::vector<FaceId> members() const;
        bool interval_closed() const;

private:
        std::shared_ptr<const Fan> fan_;
        std::vector<bool> present_;
};

struct SubsetInfo {
        bool is_open = false;
        bool is_closed = false;
        std::vector<bool> closure; /* smallest closed (star-closed) superset */
        std::vector<bool> star;    /* smallest open (face-closed) superset */
};

SubsetInfo subfan_ops(const QuasiFan &delta, const std::vector<bool> &subset);
std::vector<bool> closure_of(const QuasiFan &delta, FaceId f); /* {rho in delta : f <= rho} */
std::vector<bool> faces_below(const QuasiFan &delta, FaceId f); /* [f] intersected with delta */
std::vector<bool> boundary_of(const QuasiFan &delta, FaceId f);

/* Per-face choice of Phi_sigma in V*, rows = canonical basis. */
class Completion {
public:
        Completion() = default;
        explicit Completion(std::vector<QMatrix> phi) : phi_(std::move(phi)) {}
        const QMatrix &phi(FaceId f) const { return phi_.at(f); }
        std::size_t size() const { return phi_.size(); }

private:
        std::vector<QMatrix> phi_;
};

Completion orthogonal_completion(const Fan &fan);
void validate_completion(const Fan &fan, const Completion &phi); /* throws FanError */
Completion dual_completion(const Fan &cone_fan, const Completion &phi, const DualCone &dual);

/* Basis of V_tau^perp intersected with Phi_sigma. */
QMatrix relative_phi(const Fan &fan, const Completion &phi, FaceId tau, FaceId sigma);
/* Intersection of the row spans of two matrices, canonical basis. */
QMatrix intersect_spans(const QMatrix &a, const QMatrix &b, std::size_t n);
/* Annihilator of the row span under the dot pairing, canonical basis. */
QMatrix annihilator(const QMatrix &rows, std::size_t n);

} // namespace kdual
