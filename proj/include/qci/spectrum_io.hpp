#pragma once

#include <string>

#include "qci/spectrum.hpp"

namespace qci {

/// Flat spectrum table: a '#' metadata line, a header row and one row per pair
/// (surfaces of revolution: lam_1,lam_2,m,k,norm_cert; tori: lam_i..., k_i..., norm_cert).
/// When bin_path is non-empty and radial samples are stored they are written there, keyed by
/// (m, k).
void write_spectrum_table(const JointSpectrum& spec, const std::string& csv_path,
                          const std::string& bin_path = "");

/// Inverse of write_spectrum_table; samples are loaded when bin_path names an existing file.
JointSpectrum read_spectrum_table(const std::string& csv_path, const std::string& bin_path = "");

}  // namespace qci
