#include "linkreg/model_io.hpp"

#include <fstream>

#include "linkreg/error.hpp"
#include "linkreg/ingestion.hpp"
#include "linkreg/serialize.hpp"

namespace linkreg {

std::string model_to_text(const FittedModel& model) { return Json(model).dump(2) + "\n"; }

FittedModel model_from_text(std::string_view text) { return decode<FittedModel>(parse_json(text, "model"), "model"); }

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << model_to_text(model);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FittedModel load_model(const std::filesystem::path& path) { return model_from_text(read_text_file(path)); }

}  // namespace linkreg
