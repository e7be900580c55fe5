#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "retina/decimal.hpp"

using retina::Decimal;

TEST_CASE("parse and canonical formatting") {
  CHECK(Decimal::parse("1900")->str() == "1900");
  CHECK(Decimal::parse("1900.00")->str() == "1900");
  CHECK(Decimal::parse("03.140")->str() == "3.14");
  CHECK(Decimal::parse("-0.50")->str() == "-0.5");
  CHECK(Decimal::parse("+12")->str() == "12");
  CHECK(Decimal::parse(".5")->str() == "0.5");
  CHECK(Decimal::parse("2.")->str() == "2");
  CHECK(Decimal::parse("0")->str() == "0");
  CHECK(Decimal::parse("-0.0")->str() == "0");
  CHECK(Decimal::parse("0.001")->str() == "0.001");
  CHECK(Decimal::parse("10.010")->str() == "10.01");
}

TEST_CASE("rejects non-decimals") {
  CHECK_FALSE(Decimal::parse("").has_value());
  CHECK_FALSE(Decimal::parse("abc").has_value());
  CHECK_FALSE(Decimal::parse("1e5").has_value());
  CHECK_FALSE(Decimal::parse("1.2.3").has_value());
  CHECK_FALSE(Decimal::parse("-").has_value());
  CHECK_FALSE(Decimal::parse(".").has_value());
  CHECK_FALSE(Decimal::parse("12 ").has_value());
}

TEST_CASE("exact comparison") {
  auto d = [](const char* s) { return *Decimal::parse(s); };
  CHECK(d("1900") == d("1900.0"));
  CHECK(d("2") < d("10"));
  CHECK(d("0.3") > d("0.29999"));
  CHECK(d("-5") < d("-4.9"));
  CHECK(d("-5") < d("0"));
  CHECK(d("0") < d("0.0001"));
  CHECK(d("123456789123456789") < d("123456789123456790"));
  CHECK(d("1.05") < d("1.5"));
  CHECK(d("100") > d("99.999999"));
}

TEST_CASE("from_int") {
  CHECK(Decimal::from_int(0).str() == "0");
  CHECK(Decimal::from_int(42).str() == "42");
  CHECK(Decimal::from_int(-7).str() == "-7");
}
