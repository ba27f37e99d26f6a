#pragma once

#include "msr/fields.hpp"

#include <string>

namespace msr {

// .fld: one JSON header line {n, N_x, N_t, T, kind, components, levels, complex},
// then little-endian float64 samples, x1 fastest, component blocks in order.
void write_fld(const std::string& path, const RealField& f);
void write_fld(const std::string& path, const ComplexField& f);
void write_fld(const std::string& path, const VectorField& f);
void write_fld(const std::string& path, const CurlField& f);
void write_fld(const std::string& path, const ScalarSpaceTimeField& f);

std::string fld_kind(const std::string& path);
RealField read_fld_scalar(const std::string& path);
ComplexField read_fld_complex(const std::string& path);
VectorField read_fld_vector(const std::string& path);
CurlField read_fld_curl(const std::string& path);
ScalarSpaceTimeField read_fld_spacetime(const std::string& path);

} // namespace msr
