#include "inflection/config.hpp"
#include "inflection/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace inflection;
using cli::parse_config_text;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string error_key(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return {};
}

}  // namespace

TEST_CASE("minimal file takes every default") {
    const auto c = parse_config_text("mode_j = 1\n");
    CHECK(c.mode_j == 1);
    CHECK(c.n_expansion == 2);
    CHECK(c.t_start == -6.0);
    CHECK(c.t_end == 6.0);
    CHECK(c.dx == 0.01);
    CHECK(c.dt == 5e-4);
    CHECK(c.tail_tol == 1e-10);
    CHECK(c.x_max_auto);
    CHECK(c.x_max == 96.0);
    CHECK(c.snapshot_times == std::vector<double>{2, 3, 4, 5, 6});
    CHECK(c.extraction_times == std::vector<double>{3, 4, 5, 6});
    CHECK(c.output_dir == "out");
    CHECK(c.j_list == std::vector<int>{1, 2, 3});

    const auto p = c.run_params();
    CHECK(p.order == 2);
    CHECK(p.x_max == 96.0);
    CHECK(p.snapshot_times == c.snapshot_times);
}

TEST_CASE("comments, blank lines and lists") {
    const auto c = parse_config_text(
        "# reference run\n"
        "\n"
        "mode_j = 2   # second mode\n"
        "t_end = 5\n"
        "snapshot_times = 4.5, 2 ,3\n"
        "extraction_times = 3,4,5\n"
        "j_list = 1, 4\n"
        "output_dir = runs/a b\n");
    CHECK(c.mode_j == 2);
    CHECK(c.snapshot_times == std::vector<double>{2, 3, 4.5});
    CHECK(c.extraction_times == std::vector<double>{3, 4, 5});
    CHECK(c.j_list == std::vector<int>{1, 4});
    CHECK(c.output_dir == "runs/a b");
}

TEST_CASE("derived defaults follow t_end") {
    const auto c = parse_config_text("t_end = 2.5\n");
    CHECK(c.snapshot_times == std::vector<double>{1, 2});
    CHECK(c.extraction_times == std::vector<double>{1.5, 2.5});
    CHECK(c.x_max == doctest::Approx(2.5 * 2.5 * 2.5 / 6.0 + 25.0));
    CHECK(parse_config_text("t_end = 1\n").x_max == 20.0);  // floor of the auto window
}

TEST_CASE("automatic window") {
    CHECK(parse_config_text("x_max = 0\nt_end = 6\n").x_max == 96.0);
    // t_end³/6 + 12
    CHECK(parse_config_text("x_max = 0\nt_end = 6\neta_margin = 2\n").x_max == 48.0);
    const auto manual = parse_config_text("x_max = 30\n");
    CHECK(manual.x_max == 30.0);
    CHECK_FALSE(manual.x_max_auto);
}

TEST_CASE("invariant violations carry the line and key") {
    CHECK_THROWS_AS(parse_config_text("t_end = -1\n"), ConfigError);
    CHECK(error_line("mode_j = 1\n# x\nt_end = -1\n") == 3);
    CHECK(error_key("mode_j = 1\n# x\nt_end = -1\n") == "t_end");
    CHECK(error_key("t_start = -1\n") == "t_start");
    CHECK(error_key("mode_j = 0\n") == "mode_j");
    CHECK(error_key("n_expansion = 7\n") == "n_expansion");
    CHECK(error_key("dx = 0\n") == "dx");
    CHECK(error_key("dt = 0.01\n") == "dt");
    CHECK(error_key("x_max = -3\n") == "x_max");
    CHECK(error_key("tail_tol = 0\n") == "tail_tol");
    CHECK(error_key("snapshot_times = -7\n") == "snapshot_times");
    CHECK(error_key("extraction_times = 0.5\n") == "extraction_times");
    CHECK(error_key("extraction_times = 7\n") == "extraction_times");
    CHECK(error_key("extraction_times = 3, 3\n") == "extraction_times");
}

TEST_CASE("malformed input") {
    CHECK(error_line("mode_j = 1\nbogus = 3\n") == 2);
    CHECK(error_key("mode_j = 1\nbogus = 3\n") == "bogus");
    CHECK(error_line("mode_j = 1\nmode_j = 2\n") == 2);
    CHECK(error_line("mode_j\n") == 1);
    CHECK(error_line("= 3\n") == 1);
    CHECK(error_line("t_end =\n") == 1);
    CHECK(error_key("t_end = six\n") == "t_end");
    CHECK(error_key("t_end = 6x\n") == "t_end");
    CHECK(error_key("t_end = inf\n") == "t_end");
    CHECK(error_key("mode_j = 1.5\n") == "mode_j");
    CHECK(error_key("snapshot_times = 1, x\n") == "snapshot_times");
}

TEST_CASE("j_list limits") {
    CHECK(error_key("j_list = 1, 2, 1\n") == "j_list");
    CHECK(error_key("j_list = 1,2,3,4,5,6\n") == "j_list");
    CHECK(error_key("j_list = 0\n") == "j_list");
    CHECK(parse_config_text("j_list = 5,4,3,2,1\n").j_list.size() == 5);
}

TEST_CASE("config files") {
    const auto path = std::filesystem::temp_directory_path() / "inflection_cfg_test.txt";
    {
        std::ofstream out(path);
        out << "mode_j = 3\ndt = 2.5e-4\n";
    }
    const auto c = cli::parse_config(path);
    CHECK(c.mode_j == 3);
    CHECK(c.dt == 2.5e-4);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(cli::parse_config(path), IoError);
    CHECK(cli::config_reference().find("tail_tol") != std::string::npos);
}

TEST_CASE("finalize on a programmatic config") {
    cli::RunConfig c;
    cli::finalize(c);
    CHECK(c.x_max == 96.0);
    CHECK(c.extraction_times.size() == 4);
    c = {};
    c.t_end = 0.0;
    CHECK_THROWS_AS(cli::finalize(c), ConfigError);
}
