#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fslab/grid.hpp"
#include "fslab/params.hpp"

namespace fslab {

enum class Space { Physical, Spectral };

// Complex field on (tangential point or mode) x (normal node) x component.
class HalfSpaceField {
public:
    HalfSpaceField() = default;
    HalfSpaceField(TangentialGridPtr tg, NormalGridPtr ng, std::size_t components, Space space);

    const TangentialGridPtr& tangential() const { return tg_; }
    const NormalGridPtr& normal() const { return ng_; }
    std::size_t components() const { return nc_; }
    std::size_t modes() const { return tg_ ? tg_->size() : 0; }
    std::size_t nodes() const { return ng_ ? ng_->size() : 0; }
    Space space() const { return space_; }
    void set_space(Space s) { space_ = s; }

    cplx& at(std::size_t mode, std::size_t node, std::size_t comp) { return v_[(mode * nodes() + node) * nc_ + comp]; }
    cplx at(std::size_t mode, std::size_t node, std::size_t comp) const {
        return v_[(mode * nodes() + node) * nc_ + comp];
    }
    std::vector<cplx>& data() { return v_; }
    const std::vector<cplx>& data() const { return v_; }

    bool same_shape(const HalfSpaceField& o) const;
    HalfSpaceField zeros_like(std::size_t components) const;
    HalfSpaceField& operator+=(const HalfSpaceField& o);
    HalfSpaceField& operator*=(cplx s);

private:
    TangentialGridPtr tg_;
    NormalGridPtr ng_;
    std::size_t nc_ = 0;
    Space space_ = Space::Physical;
    std::vector<cplx> v_;
};

// Complex field on the boundary x_N = 0.
class BoundaryField {
public:
    BoundaryField() = default;
    BoundaryField(TangentialGridPtr tg, std::size_t components, Space space);

    const TangentialGridPtr& tangential() const { return tg_; }
    std::size_t components() const { return nc_; }
    std::size_t modes() const { return tg_ ? tg_->size() : 0; }
    Space space() const { return space_; }
    void set_space(Space s) { space_ = s; }

    cplx& at(std::size_t mode, std::size_t comp) { return v_[mode * nc_ + comp]; }
    cplx at(std::size_t mode, std::size_t comp) const { return v_[mode * nc_ + comp]; }
    std::vector<cplx>& data() { return v_; }
    const std::vector<cplx>& data() const { return v_; }

    bool same_shape(const BoundaryField& o) const;
    BoundaryField& operator+=(const BoundaryField& o);
    BoundaryField& operator*=(cplx s);

private:
    TangentialGridPtr tg_;
    std::size_t nc_ = 0;
    Space space_ = Space::Physical;
    std::vector<cplx> v_;
};

enum class Direction { Forward, Inverse };

// Tangential FFT scaled so that forward approximates the continuous transform
// int e^{-i x.xi} f(x) dx and inverse its inverse, on the periodized box.
HalfSpaceField transform_tangential(const HalfSpaceField& f, Direction dir);
BoundaryField transform_tangential(const BoundaryField& f, Direction dir);

HalfSpaceField to_spectral(const HalfSpaceField& f);
HalfSpaceField to_physical(const HalfSpaceField& f);
BoundaryField to_spectral(const BoundaryField& f);
BoundaryField to_physical(const BoundaryField& f);

// Values at x_N = 0.
BoundaryField trace(const HalfSpaceField& f);

// Largest magnitude on the outermost ring of tangential points relative to the
// global maximum; the periodization assumes this is tiny.
double edge_ratio(const HalfSpaceField& f);
double edge_ratio(const BoundaryField& f);

// CSV: one row per (mode, node), columns c<k>_re, c<k>_im.
void write_csv(const HalfSpaceField& f, const std::string& path);
void write_csv(const BoundaryField& f, const std::string& path);

// Little-endian complex128 block, index order (tangential..., normal, component),
// with a JSON sidecar `<path>.json` describing dims, counts, dtype and grids.
void write_binary(const HalfSpaceField& f, const std::string& path);
void write_binary(const BoundaryField& f, const std::string& path);
HalfSpaceField read_binary_halfspace(const std::string& path);
BoundaryField read_binary_boundary(const std::string& path);

}  // namespace fslab
