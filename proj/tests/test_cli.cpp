#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LONELY_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Parse the csv body: skip "# key: value" comment lines, return rows split
// on commas (the emitted tables never quote these simple fields).
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("exact p prints the exact rational", "[cli]") {
  const auto res = run_cli("exact p --n 3 --k 2");
  REQUIRE(res.exit_code == 0);
  REQUIRE(contains(res.output, "3/4"));

  const auto one = run_cli("exact p --n 1 --k 7");
  REQUIRE(one.exit_code == 0);
  REQUIRE(contains(one.output, "1/1"));
}

TEST_CASE("json and csv outputs carry the same table", "[cli]") {
  const auto js = run_cli("exact dist --n 3 --k 3 --format json");
  REQUIRE(js.exit_code == 0);
  const auto doc = nlohmann::json::parse(js.output);
  REQUIRE(doc["command"] == "exact dist");
  REQUIRE(doc["summary"]["p_lonely"] == "8/9");
  REQUIRE(doc["rows"].size() == 3);

  const auto cs = run_cli("exact dist --n 3 --k 3");
  REQUIRE(cs.exit_code == 0);
  const auto rows = csv_rows(cs.output);
  REQUIRE(rows.size() == doc["rows"].size() + 1);  // header plus data rows
  REQUIRE(rows[0] == std::vector<std::string>{"lonely", "probability", "probability_decimal"});
  for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
    REQUIRE(rows[i + 1][0] == doc["rows"][i]["lonely"].get<std::string>());
    REQUIRE(rows[i + 1][1] == doc["rows"][i]["probability"].get<std::string>());
  }
  REQUIRE(rows[1][1] == "1/9");
  REQUIRE(rows[2][1] == "2/3");
  REQUIRE(rows[3][1] == "2/9");
}

TEST_CASE("exact ne slices", "[cli]") {
  const auto res = run_cli("exact ne --n 3 --l 2 --m 2 --format json");
  REQUIRE(res.exit_code == 0);
  const auto doc = nlohmann::json::parse(res.output);
  REQUIRE(doc["rows"].size() == 2);
  REQUIRE(doc["rows"][0]["occupied"] == "1");
  REQUIRE(doc["rows"][0]["probability"] == "1/3");
  REQUIRE(doc["rows"][1]["occupied"] == "2");
  REQUIRE(doc["rows"][1]["probability"] == "2/3");

  // Without --m every slice appears, from the empty start to full occupancy.
  const auto all = run_cli("exact ne --n 3 --l 2 --format json");
  REQUIRE(all.exit_code == 0);
  const auto whole = nlohmann::json::parse(all.output);
  REQUIRE(whole["rows"][0]["m"] == "0");
  REQUIRE(whole["rows"][0]["probability"] == "1/1");
}

TEST_CASE("check suites succeed on small grids", "[cli]") {
  const auto theorem = run_cli("check theorem --n-max 6 --k-max 4 --format json");
  REQUIRE(theorem.exit_code == 0);
  const auto doc = nlohmann::json::parse(theorem.output);
  REQUIRE(doc["summary"]["all_strict"] == "true");
  REQUIRE(doc["summary"]["p_monotone"] == "true");
  REQUIRE(doc["rows"].size() == 15);  // five passenger counts, three fleet steps

  REQUIRE(run_cli("check stirling --n-max 60").exit_code == 0);
  REQUIRE(run_cli("check lemmas --n-max 6 --k-max 4").exit_code == 0);
  REQUIRE(run_cli("check oracle --n-max 8 --k-max 5").exit_code == 0);
  REQUIRE(run_cli("check couplings --n-max 5 --paths 2000").exit_code == 0);
}

TEST_CASE("couple subcommands verify and the negative control fails", "[cli]") {
  const auto mono = run_cli("couple monotone --n 6 --l 3 --paths 500 --seed 9 --format json");
  REQUIRE(mono.exit_code == 0);
  const auto doc = nlohmann::json::parse(mono.output);
  REQUIRE(doc["summary"]["clean"] == "true");
  bool saw_pathwise = false, saw_shape = false;
  for (const auto& row : doc["rows"]) {
    if (row["check"] == "pathwise-ge") {
      saw_pathwise = true;
      REQUIRE(row["violations"] == "0");
    }
    if (row["check"] == "monotone-difference") saw_shape = true;
  }
  REQUIRE(saw_pathwise);
  REQUIRE(saw_shape);

  REQUIRE(run_cli("couple forward --n 5 --k 2 --paths 500").exit_code == 0);
  REQUIRE(run_cli("couple lonely --n 5 --l 3 --paths 500").exit_code == 0);

  const auto control =
      run_cli("couple conditioned --n 6 --l 3 --paths 200 --seed 5 --negative-control");
  REQUIRE(control.exit_code == 1);
  REQUIRE(contains(control.output, "clean: false"));
}

TEST_CASE("mc subcommands", "[cli]") {
  const auto certain = run_cli("mc p --n 1 --k 3 --samples 500 --format json");
  REQUIRE(certain.exit_code == 0);
  const auto doc = nlohmann::json::parse(certain.output);
  REQUIRE(doc["rows"][0]["estimate"] == "1");
  REQUIRE(doc["rows"][0]["exact"] == "1/1");

  REQUIRE(run_cli("mc p --n 4 --k 3 --samples 20000").exit_code == 0);
  REQUIRE(run_cli("mc shadow --n 5 --k-max 3 --samples 5000").exit_code == 0);
}

TEST_CASE("oracle subcommands cross-check the exact engine", "[cli]") {
  const auto joint = run_cli("oracle joint --n 3 --k 3 --format json");
  REQUIRE(joint.exit_code == 0);
  const auto doc = nlohmann::json::parse(joint.output);
  REQUIRE(doc["summary"]["matches_recursion"] == "true");
  bool saw_distinct = false;
  for (const auto& row : doc["rows"])
    if (row["occupied"] == "3" && row["lonely"] == "3") {
      saw_distinct = true;
      REQUIRE(row["probability"] == "2/9");
    }
  REQUIRE(saw_distinct);

  const auto ne = run_cli("oracle ne --n 4 --l 2 --format json");
  REQUIRE(ne.exit_code == 0);
  const auto ne_doc = nlohmann::json::parse(ne.output);
  REQUIRE(ne_doc["summary"]["matches_chain"] == "true");
  REQUIRE(ne_doc["summary"]["surjective_configs"] == "14");
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  REQUIRE(run_cli("exact p --n 3").exit_code == 2);
  REQUIRE(run_cli("frobnicate").exit_code == 2);
  REQUIRE(run_cli("exact p --n 3 --k 2 --format yaml").exit_code == 2);
  REQUIRE(run_cli("exact ne --n 2 --l 3").exit_code == 2);
  REQUIRE(run_cli("").exit_code == 2);  // a subcommand is required
}

TEST_CASE("enumeration limits exit with code 3", "[cli]") {
  const auto res = run_cli("oracle joint --n 30 --k 2 --limit 1000");
  REQUIRE(res.exit_code == 3);
  REQUIRE(contains(res.output, "limit"));
}
