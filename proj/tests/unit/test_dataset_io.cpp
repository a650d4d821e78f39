#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dcrm/dataset_io.hpp"
#include "dcrm/errors.hpp"
#include "dcrm/problems.hpp"

using namespace dcrm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dcrm_unit";
  fs::create_directories(dir);
  return dir / name;
}

FormatError::Kind read_error(const fs::path& p) {
  try {
    read_dataset(p);
  } catch (const FormatError& e) {
    return e.kind();
  }
  FAIL("no FormatError");
  return FormatError::Kind::kIo;
}

}  // namespace

TEST_SUITE("dataset_io") {
  TEST_CASE("round trip with and without labels") {
    const CaseDefinition def = case_definition(CaseId::kCase3);
    for (bool labels : {true, false}) {
      const Dataset d = assemble_dataset(def, GridSpec(9), 3, 42, labels);
      const fs::path p = temp_file(labels ? "labeled.bin" : "unlabeled.bin");
      write_dataset(d, p);
      const Dataset r = read_dataset(p);
      CHECK(r.case_id == CaseId::kCase3);
      CHECK(r.seed == 42);
      CHECK(r.outputs.has_value() == labels);
      REQUIRE(r.inputs.same_shape(d.inputs));
      for (std::size_t i = 0; i < d.inputs.values().size(); ++i) CHECK(r.inputs.values()[i] == d.inputs.values()[i]);
      if (labels)
        for (std::size_t i = 0; i < d.outputs->values().size(); ++i)
          CHECK(r.outputs->values()[i] == d.outputs->values()[i]);
      CHECK(r.norm_stats[1].mean == d.norm_stats[1].mean);
      CHECK(r.norm_stats[0].std == d.norm_stats[0].std);
      CHECK(fs::file_size(p) == 8 + 4 + 8 + 4 * 3 + 1 + 2 * 16 + 8 * (3 * 2 * 81 + (labels ? 3 * 81 : 0)));
    }
  }

  TEST_CASE("malformed files") {
    const Dataset d = assemble_dataset(case_definition(CaseId::kCase2), GridSpec(9), 2, 1, false);
    const fs::path good = temp_file("good.bin");
    write_dataset(d, good);
    std::string bytes;
    {
      std::ifstream in(good, std::ios::binary);
      bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    const auto write = [](const fs::path& p, const std::string& b) {
      std::ofstream out(p, std::ios::binary);
      out << b;
    };
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    write(temp_file("magic.bin"), bad_magic);
    CHECK(read_error(temp_file("magic.bin")) == FormatError::Kind::kBadMagic);

    write(temp_file("short.bin"), bytes.substr(0, bytes.size() - 8));
    CHECK(read_error(temp_file("short.bin")) == FormatError::Kind::kTruncatedPayload);

    std::string bad_case = bytes;
    bad_case[8] = 9;  // case id outside {1, 2, 3}
    write(temp_file("case.bin"), bad_case);
    CHECK(read_error(temp_file("case.bin")) == FormatError::Kind::kHeaderMismatch);

    CHECK(read_error(temp_file("missing.bin.none")) == FormatError::Kind::kIo);
  }
}
