#include "fslab/field.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <nlohmann/json.hpp>

#include "fslab/errors.hpp"

namespace fslab {

HalfSpaceField::HalfSpaceField(TangentialGridPtr tg, NormalGridPtr ng, std::size_t components, Space space)
    : tg_(std::move(tg)), ng_(std::move(ng)), nc_(components), space_(space) {
    if (!tg_ || !ng_) throw ShapeError("field needs both grids");
    if (nc_ == 0) throw ShapeError("field needs at least one component");
    v_.assign(tg_->size() * ng_->size() * nc_, cplx(0.0, 0.0));
}

bool HalfSpaceField::same_shape(const HalfSpaceField& o) const {
    return tg_ && o.tg_ && ng_ && o.ng_ && tg_->dim() == o.tg_->dim() && tg_->n() == o.tg_->n() &&
           tg_->half_length() == o.tg_->half_length() && ng_->size() == o.ng_->size() &&
           ng_->length() == o.ng_->length() && ng_->map_length() == o.ng_->map_length() && nc_ == o.nc_;
}

HalfSpaceField HalfSpaceField::zeros_like(std::size_t components) const {
    return HalfSpaceField(tg_, ng_, components, space_);
}

HalfSpaceField& HalfSpaceField::operator+=(const HalfSpaceField& o) {
    if (!same_shape(o) || space_ != o.space_) throw ShapeError("field shapes differ");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

HalfSpaceField& HalfSpaceField::operator*=(cplx s) {
    for (auto& v : v_) v *= s;
    return *this;
}

BoundaryField::BoundaryField(TangentialGridPtr tg, std::size_t components, Space space)
    : tg_(std::move(tg)), nc_(components), space_(space) {
    if (!tg_) throw ShapeError("field needs a tangential grid");
    if (nc_ == 0) throw ShapeError("field needs at least one component");
    v_.assign(tg_->size() * nc_, cplx(0.0, 0.0));
}

bool BoundaryField::same_shape(const BoundaryField& o) const {
    return tg_ && o.tg_ && tg_->dim() == o.tg_->dim() && tg_->n() == o.tg_->n() &&
           tg_->half_length() == o.tg_->half_length() && nc_ == o.nc_;
}

BoundaryField& BoundaryField::operator+=(const BoundaryField& o) {
    if (!same_shape(o) || space_ != o.space_) throw ShapeError("field shapes differ");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

BoundaryField& BoundaryField::operator*=(cplx s) {
    for (auto& v : v_) v *= s;
    return *this;
}

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Phase (-1)^k from the box offset -L; applied to spectral values on either side of the FFT.
void apply_offset_phase(std::vector<cplx>& data, const TangentialGrid& tg, std::size_t howmany, double scale) {
    for (std::size_t m = 0; m < tg.size(); ++m) {
        const auto [a, b] = tg.split(m);
        const double sign = ((a + b) % 2) ? -scale : scale;
        for (std::size_t k = 0; k < howmany; ++k) data[m * howmany + k] *= sign;
    }
}

// In-place transform of `howmany` interleaved tangential arrays (stride howmany).
void fft_interleaved(std::vector<cplx>& data, const TangentialGrid& tg, std::size_t howmany, Direction dir) {
    const int n = static_cast<int>(tg.n());
    int dims[2] = {n, n};
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    if (dir == Direction::Inverse)
        apply_offset_phase(data, tg, howmany, std::pow(1.0 / (2.0 * tg.half_length()), tg.dim()));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_many_dft(tg.dim(), dims, static_cast<int>(howmany), buf, nullptr, static_cast<int>(howmany),
                                  1, buf, nullptr, static_cast<int>(howmany), 1,
                                  dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw ShapeError("FFT planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (dir == Direction::Forward) apply_offset_phase(data, tg, howmany, std::pow(tg.dx(), tg.dim()));
}

Space target(Direction dir) { return dir == Direction::Forward ? Space::Spectral : Space::Physical; }

}  // namespace

HalfSpaceField transform_tangential(const HalfSpaceField& f, Direction dir) {
    if (!f.tangential()) throw ShapeError("empty field");
    if (f.space() == target(dir)) throw ShapeError("field is already in the requested space");
    HalfSpaceField out = f;
    fft_interleaved(out.data(), *f.tangential(), f.nodes() * f.components(), dir);
    out.set_space(target(dir));
    return out;
}

BoundaryField transform_tangential(const BoundaryField& f, Direction dir) {
    if (!f.tangential()) throw ShapeError("empty field");
    if (f.space() == target(dir)) throw ShapeError("field is already in the requested space");
    BoundaryField out = f;
    fft_interleaved(out.data(), *f.tangential(), f.components(), dir);
    out.set_space(target(dir));
    return out;
}

HalfSpaceField to_spectral(const HalfSpaceField& f) {
    return f.space() == Space::Spectral ? f : transform_tangential(f, Direction::Forward);
}
HalfSpaceField to_physical(const HalfSpaceField& f) {
    return f.space() == Space::Physical ? f : transform_tangential(f, Direction::Inverse);
}
BoundaryField to_spectral(const BoundaryField& f) {
    return f.space() == Space::Spectral ? f : transform_tangential(f, Direction::Forward);
}
BoundaryField to_physical(const BoundaryField& f) {
    return f.space() == Space::Physical ? f : transform_tangential(f, Direction::Inverse);
}

BoundaryField trace(const HalfSpaceField& f) {
    BoundaryField b(f.tangential(), f.components(), f.space());
    for (std::size_t m = 0; m < f.modes(); ++m)
        for (std::size_t c = 0; c < f.components(); ++c) b.at(m, c) = f.at(m, 0, c);
    return b;
}

namespace {

bool on_edge(const TangentialGrid& tg, std::size_t p) {
    const auto [a, b] = tg.split(p);
    const std::size_t last = tg.n() - 1;
    if (a == 0 || a == last) return true;
    return tg.dim() == 2 && (b == 0 || b == last);
}

}  // namespace

double edge_ratio(const HalfSpaceField& f) {
    if (f.space() != Space::Physical) return edge_ratio(to_physical(f));
    double edge = 0.0, all = 0.0;
    const std::size_t per = f.nodes() * f.components();
    for (std::size_t p = 0; p < f.modes(); ++p) {
        const bool e = on_edge(*f.tangential(), p);
        for (std::size_t k = 0; k < per; ++k) {
            const double v = std::abs(f.data()[p * per + k]);
            all = std::max(all, v);
            if (e) edge = std::max(edge, v);
        }
    }
    return all > 0 ? edge / all : 0.0;
}

double edge_ratio(const BoundaryField& f) {
    if (f.space() != Space::Physical) return edge_ratio(to_physical(f));
    double edge = 0.0, all = 0.0;
    for (std::size_t p = 0; p < f.modes(); ++p) {
        const bool e = on_edge(*f.tangential(), p);
        for (std::size_t c = 0; c < f.components(); ++c) {
            const double v = std::abs(f.at(p, c));
            all = std::max(all, v);
            if (e) edge = std::max(edge, v);
        }
    }
    return all > 0 ? edge / all : 0.0;
}

namespace {

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    os << std::setprecision(17);
    return os;
}

void csv_header(std::ostream& os, std::size_t nc) {
    for (std::size_t c = 0; c < nc; ++c) os << ",c" << c << "_re,c" << c << "_im";
    os << '\n';
}

nlohmann::json tangential_json(const TangentialGrid& tg) {
    return {{"dim", tg.dim()}, {"n", tg.n()}, {"halfLength", tg.half_length()}};
}

void write_block(const std::vector<cplx>& v, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "binary field output assumes a little-endian host");
    auto os = open_out(path, true);
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

void read_block(std::vector<cplx>& v, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
    if (is.gcount() != static_cast<std::streamsize>(v.size() * sizeof(cplx)))
        throw ShapeError("binary block '" + path + "' is shorter than its header declares");
}

nlohmann::json read_sidecar(const std::string& path) {
    std::ifstream is(path + ".json");
    if (!is) throw ConfigError("missing sidecar '" + path + ".json'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad sidecar: ") + e.what());
    }
    if (j.value("dtype", "") != "complex128") throw ShapeError("unsupported dtype in sidecar");
    return j;
}

}  // namespace

void write_csv(const HalfSpaceField& f, const std::string& path) {
    auto os = open_out(path, false);
    os << (f.space() == Space::Spectral ? "mode" : "point") << ",node";
    csv_header(os, f.components());
    for (std::size_t m = 0; m < f.modes(); ++m)
        for (std::size_t i = 0; i < f.nodes(); ++i) {
            os << m << ',' << i;
            for (std::size_t c = 0; c < f.components(); ++c)
                os << ',' << f.at(m, i, c).real() << ',' << f.at(m, i, c).imag();
            os << '\n';
        }
}

void write_csv(const BoundaryField& f, const std::string& path) {
    auto os = open_out(path, false);
    os << (f.space() == Space::Spectral ? "mode" : "point");
    csv_header(os, f.components());
    for (std::size_t m = 0; m < f.modes(); ++m) {
        os << m;
        for (std::size_t c = 0; c < f.components(); ++c) os << ',' << f.at(m, c).real() << ',' << f.at(m, c).imag();
        os << '\n';
    }
}

void write_binary(const HalfSpaceField& f, const std::string& path) {
    write_block(f.data(), path);
    const auto& tg = *f.tangential();
    std::vector<std::size_t> counts(static_cast<std::size_t>(tg.dim()), tg.n());
    counts.push_back(f.nodes());
    counts.push_back(f.components());
    nlohmann::json j = {{"kind", "halfspace"},
                        {"dims", tg.dim() + 2},
                        {"counts", counts},
                        {"dtype", "complex128"},
                        {"byteOrder", "little"},
                        {"space", f.space() == Space::Spectral ? "spectral" : "physical"},
                        {"tangential", tangential_json(tg)},
                        {"normal",
                         {{"n", f.nodes()}, {"length", f.normal()->length()}, {"mapLength", f.normal()->map_length()}}}};
    auto os = open_out(path + ".json", false);
    os << j.dump(2) << '\n';
}

void write_binary(const BoundaryField& f, const std::string& path) {
    write_block(f.data(), path);
    const auto& tg = *f.tangential();
    std::vector<std::size_t> counts(static_cast<std::size_t>(tg.dim()), tg.n());
    counts.push_back(f.components());
    nlohmann::json j = {{"kind", "boundary"},
                        {"dims", tg.dim() + 1},
                        {"counts", counts},
                        {"dtype", "complex128"},
                        {"byteOrder", "little"},
                        {"space", f.space() == Space::Spectral ? "spectral" : "physical"},
                        {"tangential", tangential_json(tg)}};
    auto os = open_out(path + ".json", false);
    os << j.dump(2) << '\n';
}

HalfSpaceField read_binary_halfspace(const std::string& path) {
    const auto j = read_sidecar(path);
    if (j.value("kind", "") != "halfspace") throw ShapeError("sidecar does not describe a half-space field");
    try {
        const auto& t = j.at("tangential");
        const auto& n = j.at("normal");
        auto tg = std::make_shared<TangentialGrid>(t.at("dim").get<int>(), t.at("n").get<std::size_t>(),
                                                   t.at("halfLength").get<double>());
        auto ng = std::make_shared<NormalGrid>(n.at("n").get<std::size_t>(), n.at("length").get<double>(),
                                               n.at("mapLength").get<double>());
        const auto counts = j.at("counts").get<std::vector<std::size_t>>();
        HalfSpaceField f(tg, ng, counts.back(), j.at("space") == "spectral" ? Space::Spectral : Space::Physical);
        read_block(f.data(), path);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad sidecar: ") + e.what());
    }
}

BoundaryField read_binary_boundary(const std::string& path) {
    const auto j = read_sidecar(path);
    if (j.value("kind", "") != "boundary") throw ShapeError("sidecar does not describe a boundary field");
    try {
        const auto& t = j.at("tangential");
        auto tg = std::make_shared<TangentialGrid>(t.at("dim").get<int>(), t.at("n").get<std::size_t>(),
                                                   t.at("halfLength").get<double>());
        const auto counts = j.at("counts").get<std::vector<std::size_t>>();
        BoundaryField f(tg, counts.back(), j.at("space") == "spectral" ? Space::Spectral : Space::Physical);
        read_block(f.data(), path);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad sidecar: ") + e.what());
    }
}

}  // namespace fslab
