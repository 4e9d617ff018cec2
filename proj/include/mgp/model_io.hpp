#ifndef MGP_MODEL_IO_HPP
#define MGP_MODEL_IO_HPP

#include "mgp/regression.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

namespace mgp {

/// Version written into the first line of every model file.
inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<MethodDModel, MethodNModel>;

/// Text model format. Every real is written with 17 significant digits so a
/// saved model predicts bit-identically after loading.
///
///   mgp-model 1
///   method D|N
///   dim <d>
///   train_count <N>
///   basis_count <D>
///   scales <S>
///   sigma / sigma_p / h1 / beta / gamma / lml / jitter <value>
///   norm_x_min <d values>
///   norm_x_range <d values>
///   norm_y <min> <range>
///   centers            then D lines "<level> <h_j> <c_1> ... <c_d>"
///   method D: weights  then D lines; chol  then D lines (row i holds L_i0..L_ii)
///   method N: alpha    then N lines; chol  then N lines; inputs then N lines of d values
///
/// Lines starting with '#' are comments.
std::string serialize_model(const AnyModel& model);
AnyModel parse_model(std::istream& in);

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace mgp

#endif  // MGP_MODEL_IO_HPP
