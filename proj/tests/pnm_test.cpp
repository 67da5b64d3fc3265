#include "papertab/pnm.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace papertab {
namespace {

TEST(Pnm, GrayRoundTripOnStream) {
  GrayFrame a(3, 2, std::vector<std::uint8_t>{0, 1, 2, 253, 254, 255});
  GrayFrame b(1, 1, std::vector<std::uint8_t>{9});
  std::stringstream s;
  pnm::write(s, a);
  pnm::write(s, b);
  EXPECT_EQ(s.str().substr(0, 11), "P5\n3 2\n255\n");
  auto fa = pnm::read_frame(s);
  auto fb = pnm::read_frame(s);
  ASSERT_TRUE(fa && fb);
  EXPECT_EQ(std::get<GrayFrame>(*fa), a);
  EXPECT_EQ(std::get<GrayFrame>(*fb), b);
  EXPECT_FALSE(pnm::read_frame(s));
}

TEST(Pnm, ColorAndComments) {
  std::stringstream s;
  s << "P6\n# a comment\n2 1 # trailing\n255\n";
  s.write("\xff\x00\x00\x00\xff\x00", 6);
  auto f = pnm::read_frame(s);
  ASSERT_TRUE(f);
  const ColorFrame c = std::get<ColorFrame>(*f);
  EXPECT_EQ(c(0, 0, 0), 255);
  EXPECT_EQ(c(1, 0, 1), 255);
  const GrayFrame g = pnm::as_gray(*f);
  EXPECT_EQ(g(0, 0), 76);
  EXPECT_EQ(g(1, 0), 150);
}

TEST(Pnm, TruncatedBodyThrows) {
  std::stringstream s("P5\n4 4\n255\nabc");
  try {
    pnm::read_frame(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Pnm, RejectsOtherFormats) {
  std::stringstream a("P2\n1 1\n255\n0\n");
  EXPECT_THROW(pnm::read_frame(a), Error);
  std::stringstream b("P5\n1 1\n65535\n\0\0");
  EXPECT_THROW(pnm::read_frame(b), Error);
}

TEST(Pnm, FileRoundTrip) {
  const auto path =
      std::filesystem::temp_directory_path() / "papertab_pnm_test.pgm";
  GrayFrame a(4, 3, 17);
  a(1, 2) = 200;
  pnm::write_file(path, a);
  EXPECT_EQ(pnm::as_gray(pnm::read_file(path)), a);
  std::filesystem::remove(path);
  EXPECT_THROW(pnm::read_file(path), Error);
}

TEST(Pnm, GrayToColorReplicates) {
  const ColorFrame c = pnm::as_color(GrayFrame(2, 2, 42));
  for (auto v : c.data()) EXPECT_EQ(v, 42);
}

}  // namespace
}  // namespace papertab
