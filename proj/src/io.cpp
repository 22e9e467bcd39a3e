#include "kdual/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace kdual {

using nlohmann::json;

namespace {

QVector vector_from_json(const json &j, std::size_t n, const std::string &what)
{
        if (!j.is_array() || j.size() != n)
                throw InputError(what + ": expected a vector of length " + std::to_string(n));
        QVector v;
        for (auto &x : j)
                v.push_back(rational_from_json(x));
        return v;
}

json vector_json(const QVector &v)
{
        json a = json::array();
        for (auto &x : v)
                a.push_back(rational_json(x));
        return a;
}

} // namespace

json rational_json(const Rational &raw)
{
        Rational q = raw;
        q.canonicalize();
        if (q.get_den() == 1 && q.get_num().fits_slong_p())
                return q.get_num().get_si();
        return q.get_str();
}

Rational rational_from_json(const json &j)
{
        if (j.is_number_unsigned())
                return Rational(std::to_string(j.get<unsigned long long>()));
        if (j.is_number_integer())
                return Rational(std::to_string(j.get<long long>()));
        if (j.is_string()) {
                try {
                        return parse_rational(j.get<std::string>());
                } catch (const std::exception &) {
                        throw InputError("not a rational number: " + j.get<std::string>());
                }
        }
        throw InputError("expected an integer or a rational string, got " + j.dump());
}

FanFile parse_fan_file(const std::string &text)
{
        json j;
        try {
                j = json::parse(text);
        } catch (const json::parse_error &e) {
                std::size_t line = 1, col = 1;
                for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); i++) {
                        if (text[i] == '\n') {
                                line++;
                                col = 1;
                        } else {
                                col++;
                        }
                }
                throw InputError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                 e.what());
        }
        if (!j.is_object())
                throw InputError("fan file must be a JSON object");
        FanFile f;
        if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_unsigned())
                throw InputError("missing or invalid \"ambient_dim\"");
        f.ambient_dim = j["ambient_dim"].get<std::size_t>();
        if (f.ambient_dim > 6)
                throw InputError("ambient_dim above 6 is outside desk scale");
        if (j.contains("name")) {
                if (!j["name"].is_string())
                        throw InputError("\"name\" must be a string");
                f.name = j["name"].get<std::string>();
        }
        if (j.contains("lattice") && j["lattice"] != "standard")
                throw InputError("only the standard lattice is supported");
        if (!j.contains("cones") || !j["cones"].is_array())
                throw InputError("missing \"cones\" list");
        for (std::size_t c = 0; c < j["cones"].size(); c++) {
                const json &cone = j["cones"][c];
                if (!cone.is_array())
                        throw InputError("cone " + std::to_string(c) + " must be a list of generators");
                std::vector<QVector> gens;
                for (auto &g : cone)
                        gens.push_back(vector_from_json(g, f.ambient_dim, "cone " + std::to_string(c)));
                f.cones.push_back(gens);
        }
        if (j.contains("completion")) {
                const json &comp = j["completion"];
                if (!comp.is_array())
                        throw InputError("\"completion\" must be a list of {rays, basis} objects");
                std::vector<CompletionEntry> entries;
                for (std::size_t i = 0; i < comp.size(); i++) {
                        const json &e = comp[i];
                        std::string where = "completion entry " + std::to_string(i);
                        if (!e.is_object() || !e.contains("rays") || !e.contains("basis") || !e["rays"].is_array() ||
                            !e["basis"].is_array())
                                throw InputError(where + ": expected {\"rays\": [...], \"basis\": [...]}");
                        CompletionEntry ce;
                        for (auto &r : e["rays"])
                                ce.rays.push_back(vector_from_json(r, f.ambient_dim, where));
                        for (auto &b : e["basis"])
                                ce.basis.push_back(vector_from_json(b, f.ambient_dim, where));
                        entries.push_back(ce);
                }
                f.completion = entries;
        }
        return f;
}

std::string read_text(const std::string &path)
{
        std::ifstream in(path, std::ios::binary);
        if (!in)
                throw InputError("cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
}

FanFile read_fan_file(const std::string &path)
{
        return parse_fan_file(read_text(path));
}

json fan_file_json(const FanFile &f)
{
        json j;
        if (!f.name.empty())
                j["name"] = f.name;
        j["ambient_dim"] = f.ambient_dim;
        j["lattice"] = "standard";
        json cones = json::array();
        for (auto &c : f.cones) {
                json cj = json::array();
                for (auto &g : c)
                        cj.push_back(vector_json(g));
                cones.push_back(cj);
        }
        j["cones"] = cones;
        if (f.completion) {
                json comp = json::array();
                for (auto &e : *f.completion) {
                        json rays = json::array(), basis = json::array();
                        for (auto &r : e.rays)
                                rays.push_back(vector_json(r));
                        for (auto &b : e.basis)
                                basis.push_back(vector_json(b));
                        comp.push_back({{"rays", rays}, {"basis", basis}});
                }
                j["completion"] = comp;
        }
        return j;
}

LoadedFan load_fan(const FanFile &f)
{
        LoadedFan out;
        try {
                Fan fan = build_fan(f.cones, f.ambient_dim);
                fan.set_name(f.name);
                out.fan = std::make_shared<const Fan>(std::move(fan));
        } catch (const FanError &e) {
                throw InputError(std::string("invalid fan: ") + e.what());
        }
        const Fan &fan = *out.fan;
        if (!f.completion) {
                out.ctx = make_context(out.fan, orthogonal_completion(fan));
                return out;
        }
        std::vector<QMatrix> phi(fan.size());
        std::vector<bool> seen(fan.size(), false);
        for (auto &e : *f.completion) {
                std::optional<FaceId> face = e.rays.empty() ? std::optional<FaceId>(fan.zero_face()) : fan.find_by_vectors(e.rays);
                if (!face)
                        throw InputError("completion entry names a ray set that is not a face");
                if (seen[*face])
                        throw InputError("completion lists a face twice");
                seen[*face] = true;
                phi[*face] = e.basis.empty() ? QMatrix(0, f.ambient_dim) : canonical_subspace_basis(e.basis, f.ambient_dim);
        }
        for (FaceId s = 0; s < fan.size(); s++)
                if (!seen[s])
                        throw InputError("completion misses face " + std::to_string(s));
        try {
                out.ctx = make_context(out.fan, Completion(std::move(phi)));
        } catch (const FanError &e) {
                throw InputError(std::string("invalid completion: ") + e.what());
        }
        return out;
}

FanFile fan_to_file(const Fan &fan, const Completion &phi, std::string name)
{
        FanFile f;
        f.name = std::move(name);
        f.ambient_dim = fan.ambient_dim();
        for (FaceId m : fan.maximal())
                f.cones.push_back(fan.ray_vectors(m));
        std::vector<CompletionEntry> entries;
        for (FaceId s = 0; s < fan.size(); s++) {
                CompletionEntry e;
                e.rays = fan.ray_vectors(s);
                for (std::size_t r = 0; r < phi.phi(s).rows(); r++)
                        e.basis.push_back(phi.phi(s).row(r));
                entries.push_back(e);
        }
        f.completion = entries;
        return f;
}

json complex_json(const InjComplex &s)
{
        json sm = json::array(), en = json::array();
        for (auto &x : s.summands())
                sm.push_back({x.cone, x.deg.u, x.deg.v});
        for (auto &[key, c] : s.entries())
                en.push_back({key.first, key.second, vector_json(c)});
        return {{"summands", sm}, {"entries", en}};
}

InjComplex complex_from_json(const ContextPtr &ctx, const json &j)
{
        if (!j.is_object() || !j.contains("summands") || !j.contains("entries"))
                throw InputError("complex must have \"summands\" and \"entries\"");
        InjComplex s = InjComplex::empty(ctx);
        try {
                for (auto &x : j["summands"]) {
                        if (!x.is_array() || x.size() != 3)
                                throw InputError("summand must be [cone, u, v]");
                        auto cone = x[0].get<std::size_t>();
                        if (cone >= ctx->fan().size())
                                throw InputError("summand cone index out of range");
                        s.add_summand(cone, {x[1].get<int>(), x[2].get<int>()});
                }
                for (auto &e : j["entries"]) {
                        if (!e.is_array() || e.size() != 3)
                                throw InputError("entry must be [from, to, coefficients]");
                        auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>();
                        if (a >= s.size() || b >= s.size())
                                throw InputError("entry summand index out of range");
                        QVector c;
                        for (auto &x : e[2])
                                c.push_back(rational_from_json(x));
                        s.set_entry(a, b, c);
                }
        } catch (const json::exception &e) {
                throw InputError(std::string("malformed complex: ") + e.what());
        } catch (const DcatError &e) {
                throw InputError(std::string("invalid complex: ") + e.what());
        }
        try {
                validate(s);
        } catch (const DcatError &e) {
                throw InputError(std::string("invalid complex: ") + e.what());
        }
        return s;
}

json dims_json(const BigradedDims &d)
{
        json a = json::array();
        for (auto &[deg, k] : d)
                if (k)
                        a.push_back({deg.u, deg.v, k});
        return a;
}

std::string fnv1a_hex(const std::string &bytes)
{
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : bytes) {
                h ^= c;
                h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
}

} // namespace kdual
