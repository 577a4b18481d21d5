#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ll2/formula.hpp"

using namespace ll2;

TEST_CASE("parse basic constructors") {
  Fm f = parse_formula("1 + 1");
  REQUIRE(f->conn == Conn::Plus);
  REQUIRE(f->a->conn == Conn::One);
  REQUIRE(f->b->conn == Conn::One);

  Fm g = parse_formula("all X. X -o X");
  REQUIRE(g->conn == Conn::Forall);
  REQUIRE(g->a->conn == Conn::Par);
  REQUIRE(g->a->a->conn == Conn::DualVar);
  REQUIRE(g->a->b->conn == Conn::Var);
  REQUIRE(g->a->a->var == g->var);

  Fm units = parse_formula("bot * top & 0");
  REQUIRE(units->conn == Conn::With);
}

TEST_CASE("parser renames shadowed binders apart") {
  Fm f = parse_formula("all X. all X. X");
  REQUIRE(f->conn == Conn::Forall);
  REQUIRE(f->a->conn == Conn::Forall);
  REQUIRE(f->var != f->a->var);
  // the inner variable is the bound one
  REQUIRE(f->a->a->var == f->a->var);
}

TEST_CASE("parser UTF-8 aliases") {
  REQUIRE(alpha_equal(parse_formula("A⊗B"), parse_formula("A*B")));
  REQUIRE(alpha_equal(parse_formula("∀X. X ⊸ X"), parse_formula("all X. X -o X")));
  REQUIRE(alpha_equal(parse_formula("⊥"), parse_formula("bot")));
}

TEST_CASE("parser errors carry positions") {
  REQUIRE_THROWS_AS(parse_formula("1 + "), ParseError);
  REQUIRE_THROWS_AS(parse_formula("~(X*X)"), ParseError);
  REQUIRE_THROWS_AS(parse_formula("all . X"), ParseError);
  // an unbound dual atom is fine
  REQUIRE_NOTHROW(parse_formula("~X"));
}

TEST_CASE("precedence and associativity") {
  REQUIRE(alpha_equal(parse_formula("X*Y|Z"), parse_formula("(X*Y)|Z")));
  REQUIRE(alpha_equal(parse_formula("X|Y&Z"), parse_formula("(X|Y)&Z")));
  REQUIRE(alpha_equal(parse_formula("X&Y+Z"), parse_formula("(X&Y)+Z")));
  REQUIRE(alpha_equal(parse_formula("X -o Y -o Z"), parse_formula("X -o (Y -o Z)")));
  REQUIRE(alpha_equal(parse_formula("X*Y*Z"), parse_formula("X*(Y*Z)")));
  REQUIRE(alpha_equal(parse_formula("!X*Y"), parse_formula("(!X)*Y")));
}

TEST_CASE("dual follows the duality table") {
  REQUIRE(dual(f_one())->conn == Conn::Bot);
  Fm t = parse_formula("A*B");
  Fm d = dual(t);
  REQUIRE(d->conn == Conn::Par);
  REQUIRE(d->a->conn == Conn::DualVar);
  REQUIRE(d->b->conn == Conn::DualVar);
  REQUIRE(alpha_equal(dual(parse_formula("all X. X")), parse_formula("ex X. ~X")));
  REQUIRE(alpha_equal(dual(parse_formula("!A")), parse_formula("?~A")));
  REQUIRE(alpha_equal(dual(parse_formula("0")), parse_formula("top")));
}

static Fm random_formula(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars,
                         bool exps) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 5 : (exps ? 13 : 11));
  switch (pick(rng)) {
    case 0: return f_one();
    case 1: return f_bot();
    case 2: return f_zero();
    case 3: return f_top();
    case 4: return f_var(vars[rng() % vars.size()]);
    case 5: return f_dualvar(vars[rng() % vars.size()]);
    case 6: return f_tensor(random_formula(rng, depth - 1, vars, exps), random_formula(rng, depth - 1, vars, exps));
    case 7: return f_par(random_formula(rng, depth - 1, vars, exps), random_formula(rng, depth - 1, vars, exps));
    case 8: return f_plus(random_formula(rng, depth - 1, vars, exps), random_formula(rng, depth - 1, vars, exps));
    case 9: return f_with(random_formula(rng, depth - 1, vars, exps), random_formula(rng, depth - 1, vars, exps));
    case 10: return f_forall("Q" + std::to_string(rng() % 3), random_formula(rng, depth - 1, vars, exps));
    case 11: return f_exists("Q" + std::to_string(rng() % 3), random_formula(rng, depth - 1, vars, exps));
    case 12: return f_bang(random_formula(rng, depth - 1, vars, exps));
    default: return f_quest(random_formula(rng, depth - 1, vars, exps));
  }
}

TEST_CASE("dual is an involution on random formulas") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    Fm f = random_formula(rng, 4, {"X", "Y", "Z"}, true);
    REQUIRE(alpha_equal(dual(dual(f)), f));
  }
}

TEST_CASE("parse then print round-trips") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Fm f = random_formula(rng, 4, {"X", "Y"}, true);
    Fm g = parse_formula(print_formula(f));
    REQUIRE(alpha_equal(f, g));
  }
  for (const char* s : {"all X. X -o X", "!(A*B)+?C", "ex Y. (Y&1)|~Y", "1+1"}) {
    REQUIRE(alpha_equal(parse_formula(print_formula(parse_formula(s))), parse_formula(s)));
  }
}

TEST_CASE("substitute") {
  REQUIRE(alpha_equal(substitute(parse_formula("X"), "X", f_one()), f_one()));
  // dual pushed to atoms
  Fm f = parse_formula("~X | X");
  Fm r = substitute(f, "X", parse_formula("1+1"));
  REQUIRE(alpha_equal(r, parse_formula("(bot&bot) | (1+1)")));
  // shadowing
  Fm sh = f_forall("X", f_var("X"));
  REQUIRE(alpha_equal(substitute(sh, "X", f_one()), sh));
  // capture avoidance: substituting Y := X under a binder on X
  Fm cap = f_forall("X", f_tensor(f_var("X"), f_var("Y")));
  Fm got = substitute(cap, "Y", f_var("X"));
  REQUIRE(got->conn == Conn::Forall);
  REQUIRE(got->var != "X");
  REQUIRE(got->a->b->var == "X");
}

TEST_CASE("free_vars / is_mall2 / subformulas") {
  REQUIRE(free_vars(parse_formula("all X. X * Y")) == std::set<std::string>{"Y"});
  REQUIRE(free_vars(parse_formula("~Z")) == std::set<std::string>{"Z"});
  REQUIRE(free_vars(parse_formula("1")).empty());
  REQUIRE(is_mall2(parse_formula("all X. X -o X")));
  REQUIRE_FALSE(is_mall2(parse_formula("!X")));
  REQUIRE_FALSE(is_mall2(parse_formula("all X. ?X")));
  REQUIRE(subformulas(parse_formula("1*1")).size() == 3);
  REQUIRE(subformulas(parse_formula("X")).size() == 1);
  REQUIRE(subformulas(parse_formula("!(X+1)")).size() == 4);
}

TEST_CASE("fincoh_condition") {
  // any MALL2 formula qualifies
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Fm f = random_formula(rng, 4, {"X", "Y"}, false);
    REQUIRE(fincoh_condition(f));
    REQUIRE((is_mall2(f) && fincoh_condition(f)));
  }
  REQUIRE_FALSE(fincoh_condition(parse_formula("!(~X|X)")));
  // Str[1+1] is closed, so every ! subformula is closed
  Fm str_bool = parse_formula("!((1+1) -o (1+1)) -o !((1+1) -o (1+1)) -o !((1+1) -o (1+1))");
  REQUIRE(fincoh_condition(str_bool));
  REQUIRE_FALSE(fincoh_condition(parse_formula("all X. !(X -o X) -o !(X -o X) -o !(X -o X)")));
}

TEST_CASE("alpha equality identifies renamed binders") {
  REQUIRE(alpha_equal(parse_formula("all X. X"), parse_formula("all Y. Y")));
  REQUIRE_FALSE(alpha_equal(parse_formula("all X. X"), parse_formula("ex Y. Y")));
  REQUIRE_FALSE(alpha_equal(parse_formula("all X. X*Y"), parse_formula("all Y. Y*Y")));
}
