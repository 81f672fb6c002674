#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "csalsa/image_io.hpp"
#include "csalsa/report.hpp"
#include "test_util.hpp"

using namespace csalsa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "csalsa_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Pgm, SixteenBitRoundTripIsBitExact)
{
    PgmImage img{Shape{3, 5}, 65535, {}};
    for (std::size_t i = 0; i < 15; ++i) img.pixels.push_back(static_cast<std::uint16_t>(i * 4369 + (i % 3)));
    const fs::path p = scratch("a.pgm");
    write_pgm(p.string(), img);
    const PgmImage back = read_pgm(p.string());
    EXPECT_EQ(back.shape, img.shape);
    EXPECT_EQ(back.maxval, 65535);
    EXPECT_EQ(back.pixels, img.pixels);
    // Big-endian samples after the header.
    const std::string bytes = slurp(p);
    const std::string header = "P5\n5 3\n65535\n";
    ASSERT_EQ(bytes.substr(0, header.size()), header);
    ASSERT_EQ(bytes.size(), header.size() + 30);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 2]), img.pixels[1] >> 8);
    EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), img.pixels[1] & 0xff);
    write_pgm(scratch("b.pgm").string(), back);
    EXPECT_EQ(slurp(scratch("b.pgm")), bytes);
}

TEST(Pgm, EightBitAndHeaderComments)
{
    const fs::path p = scratch("c.pgm");
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n# made by hand\n2 2\n# another\n255\n";
        out.put(0).put(10).put(static_cast<char>(200)).put(static_cast<char>(255));
    }
    const PgmImage img = read_pgm(p.string());
    EXPECT_EQ(img.maxval, 255);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{0, 10, 200, 255}));
    const ImageGrid g = to_image(img, 255.0);
    EXPECT_DOUBLE_EQ(g(1, 0), 200.0);
}

TEST(Pgm, RejectsMalformedFiles)
{
    const fs::path p = scratch("bad.pgm");
    {
        std::ofstream out(p, std::ios::binary);
        out << "P2\n2 2\n255\n0 0 0 0\n";
    }
    EXPECT_THROW(read_pgm(p.string()), DomainError);
    {
        std::ofstream out(p, std::ios::binary);
        out << "P5\n4 4\n255\n";
        out.put(1);
    }
    EXPECT_THROW(read_pgm(p.string()), DomainError);
    EXPECT_THROW(read_pgm(scratch("missing.pgm").string()), DomainError);
}

TEST(Pgm, QuantizeClipsAndScales)
{
    const ImageGrid g(Shape{1, 4}, RVec{-1.0, 0.0, 0.5, 2.0});
    const PgmImage q = quantize(g, 0.0, 1.0, 65535);
    EXPECT_EQ(q.pixels, (std::vector<std::uint16_t>{0, 0, 32768, 65535}));
}

TEST(Pbm, RoundTripIsBitExact)
{
    // Width 11 exercises the padding bits at the end of each row.
    Mask m(Shape{3, 11});
    std::mt19937_64 rng(1);
    for (auto& v : m.values()) v = rng() & 1;
    const fs::path p = scratch("m.pbm");
    write_pbm(p.string(), m);
    EXPECT_EQ(read_pbm(p.string()), m);
    const std::string bytes = slurp(p);
    EXPECT_EQ(bytes.substr(0, 2), "P4");
    EXPECT_EQ(bytes.size() - (bytes.find("11 3\n") + 5), 3u * 2u);
}

TEST(Pbm, MostSignificantBitFirst)
{
    Mask m(Shape{1, 8});
    m[0] = 1;
    m[7] = 1;
    const fs::path p = scratch("bits.pbm");
    write_pbm(p.string(), m);
    const std::string bytes = slurp(p);
    EXPECT_EQ(static_cast<unsigned char>(bytes.back()), 0x81);
}

TEST(Report, HistoryCsvLayout)
{
    std::vector<IterationRecord> h = {{1, 2.5, 0.125, 1e-3, 0.01, 4.0}, {2, 2.25, 0.0625, 5e-4, 0.02, std::nullopt}};
    const fs::path p = scratch("h.csv");
    write_history_csv(p.string(), h);
    EXPECT_EQ(slurp(p), "k,objective,constraint_norm,primal_residual,mse\n"
                        "1,2.5,0.125,0.001,4\n"
                        "2,2.25,0.0625,0.00050000000000000001,\n");
    const fs::path t = scratch("t.csv");
    write_timing_csv(t.string(), h);
    EXPECT_EQ(slurp(t), "k,wall_time_s\n1,0.01\n2,0.02\n");
}

TEST(Report, OutputPaths)
{
    const RunOutputs o = output_paths("root", "run");
    EXPECT_EQ(o.directory, (fs::path("root") / "run").string());
    EXPECT_EQ(fs::path(o.history_csv).filename(), "history.csv");
    EXPECT_EQ(fs::path(o.summary_json).filename(), "summary.json");
    EXPECT_EQ(fs::path(o.reconstruction_pgm).filename(), "reconstruction.pgm");
}
