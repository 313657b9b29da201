#include "tagsight/linsvm.hpp"

#include "binary_io.hpp"

#include <array>
#include <limits>

namespace tagsight::linsvm {
namespace {
constexpr std::array<char, 8> kMagic = {'T', 'S', 'V', 'M', '0', '0', '0', '1'};
}

void save_model(const std::filesystem::path& path, const LinearModel<double>& model) {
  if (model.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("model dimension too large for the TSVM format");
  }
  tagsight::detail::BinaryWriter out(path);
  out.bytes(kMagic.data(), kMagic.size());
  out.u32(static_cast<std::uint32_t>(model.dim()));
  for (Eigen::Index j = 0; j < model.dim(); ++j) out.f64(model.w(j));
  out.f64(model.b);
  out.f64(model.cost);
  out.f64(model.weight_positive);
  out.f64(model.weight_negative);
  out.u64(model.seed);
  out.f64(model.tol);
  out.u32(static_cast<std::uint32_t>(model.epochs_run));
  out.f64(model.final_objective);
  out.finish();
}

LinearModel<double> load_model(const std::filesystem::path& path) {
  tagsight::detail::BinaryReader in(path);
  std::array<char, 8> magic{};
  in.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw DataError("bad magic in model file " + path.string());
  LinearModel<double> model;
  const std::uint32_t d = in.u32();
  model.w.resize(d);
  for (std::uint32_t j = 0; j < d; ++j) model.w(j) = in.f64();
  model.b = in.f64();
  model.cost = in.f64();
  model.weight_positive = in.f64();
  model.weight_negative = in.f64();
  model.seed = in.u64();
  model.tol = in.f64();
  model.epochs_run = in.u32();
  model.final_objective = in.f64();
  if (!in.at_end()) throw DataError("trailing bytes in model file " + path.string());
  return model;
}

}  // namespace tagsight::linsvm
