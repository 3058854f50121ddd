#include <doctest.h>

#include <clocale>
#include <cstring>
#include <filesystem>
#include <regex>

#include "mondrian/functionals.hpp"
#include "mondrian/io.hpp"

using namespace mondrian;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("tessellation JSON round-trips bit-exactly") {
    const auto tess = sample(Rect(-0.3, 1.7, 0.1, 2.9), SimParams(Weight(0.37), 6.5, 0xDEADBEEFCAFEULL));
    REQUIRE(tess.edges().size() > 10);
    const auto text = tessellation_to_json(tess).dump();
    const auto back = tessellation_from_json(nlohmann::json::parse(text));
    CHECK(back.window() == tess.window());
    CHECK(back.params().seed() == tess.params().seed());
    CHECK(back.params().p().value() == tess.params().p().value());
    REQUIRE(back.edges().size() == tess.edges().size());
    for (std::size_t i = 0; i < tess.edges().size(); ++i) {
        CHECK(back.edges()[i].seg == tess.edges()[i].seg);
        CHECK(std::memcmp(&back.edges()[i].birth, &tess.edges()[i].birth, sizeof(double)) == 0);
    }
    CHECK(tessellation_to_json(back).dump() == text);
}

TEST_CASE("JSON reader rejects unknown versions and broken structure") {
    auto j = tessellation_to_json(sample(Rect(0, 1, 0, 1), SimParams(Weight(0.5), 3, 1)));
    j["version"] = 2;
    CHECK_THROWS_AS(tessellation_from_json(j), std::invalid_argument);
    j["version"] = 1;
    j["edges"][0]["o"] = "D";
    CHECK_THROWS_AS(tessellation_from_json(j), std::invalid_argument);
    j.erase("edges");
    CHECK_THROWS_AS(tessellation_from_json(j), std::invalid_argument);

    // an edge that stops short of its cell boundary
    const nlohmann::json bad = nlohmann::json::parse(
        R"({"version":1,"window":[0,1,0,1],"p":0.5,"t":1,"seed":0,
            "edges":[{"o":"V","c":0.5,"lo":0,"hi":0.9,"birth":0.5}]})");
    CHECK_THROWS_AS(tessellation_from_json(bad), std::invalid_argument);
    // tiny serialisation slack is accepted
    const nlohmann::json slack = nlohmann::json::parse(
        R"({"version":1,"window":[0,1,0,1],"p":0.5,"t":1,"seed":0,
            "edges":[{"o":"V","c":0.5,"lo":0,"hi":1,"birth":0.5},
                     {"o":"H","c":0.25,"lo":0,"hi":0.5000000000001,"birth":0.7}]})");
    CHECK(vertices(tessellation_from_json(slack), 1e-9).size() == 1);
}

TEST_CASE("SVG output") {
    const auto tess = sample(Rect(0, 1, 0, 1), SimParams(Weight(0.5), 20, 7));
    const auto svg = tessellation_to_svg(tess);
    CHECK(count(svg, "<line") == sigma_one(tess));
    CHECK(svg.find("viewBox=\"0 0 1 1\"") != std::string::npos);

    const auto empty = tessellation_to_svg(sample(Rect(0, 1, 0, 1), SimParams(Weight(0.5), 1e-300, 7)));
    CHECK(count(empty, "<line") == 0);
    CHECK(count(empty, "<rect") == 1);

    // y is flipped: a horizontal edge at y = 2.5 in [2,4] is drawn at 3.5
    const Tessellation one(Rect(0, 1, 2, 4), SimParams(Weight(0.5), 1, 0),
                           {{Segment(Orientation::H, 2.5, 0, 1), 0.5}});
    const auto s1 = tessellation_to_svg(one, true);
    CHECK(s1.find("y1=\"3.5\"") != std::string::npos);
    CHECK(s1.find("viewBox=\"0 2 1 2\"") != std::string::npos);
    CHECK(s1.find("rgb(") != std::string::npos);
}

TEST_CASE("number formatting ignores the C locale") {
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(csv_line({"a", "1.25", "x,y"}) == "a,1.25,\"x,y\"\n");
    std::setlocale(LC_NUMERIC, saved.c_str());
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("atomic write leaves no temporary files") {
    const fs::path dir = fs::temp_directory_path() / "mondrian_io_test";
    fs::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.txt").string(), "x"), std::runtime_error);
    fs::remove_all(dir);
}
