#include <catch2/catch_amalgamated.hpp>

#include "ll2/cutelim.hpp"
#include "ll2/sequent.hpp"
#include "ll2/stock.hpp"

using namespace ll2;

TEST_CASE("ax and the boolean proofs") {
  Fm a = parse_formula("X*1");
  Sequent s = check_proof(p_ax(a));
  REQUIRE(s.size() == 2);
  REQUIRE(alpha_equal(s[0], a));
  REQUIRE(alpha_equal(s[1], dual(a)));

  REQUIRE(sequent_alpha_equal(check_proof(p_true()), {f_bool()}));
  REQUIRE(sequent_alpha_equal(check_proof(p_false()), {f_bool()}));
}

TEST_CASE("tensor par and units") {
  // |- 1 * 1
  Proof t = p_tensor(p_one(), p_one());
  REQUIRE(sequent_alpha_equal(check_proof(t), {parse_formula("1*1")}));
  // |- bot, 1*1 via bot on the left premise
  Proof t2 = p_tensor(p_bot(p_one()), p_one());
  // premise |- 1, bot: tensor wants A last: that's bot * 1
  REQUIRE(sequent_alpha_equal(check_proof(t2), {f_one(), parse_formula("bot*1")}));
  Proof pr = p_par(p_ax(f_dualvar("X")));
  REQUIRE(sequent_alpha_equal(check_proof(pr), {parse_formula("~X|X")}));
}

TEST_CASE("identity on the string type checks") {
  Fm a = parse_formula("1+1");
  REQUIRE(sequent_alpha_equal(check_proof(p_composite(a, 0)), {f_step(a)}));
  REQUIRE(sequent_alpha_equal(check_proof(p_composite(a, 2)),
                              {dual(f_step(a)), dual(f_step(a)), f_step(a)}));
}

TEST_CASE("forall side condition") {
  // |- all X. ~X|X is fine
  Proof ok = p_forall("X", p_par(p_ax(f_dualvar("X"))));
  REQUIRE(sequent_alpha_equal(check_proof(ok), {parse_formula("all X. ~X|X")}));
  // forall X over |- X, ~X leaves X free in the context: rejected
  Proof bad = p_forall("X", p_ax(f_var("X")));
  REQUIRE_THROWS_AS(check_proof(bad), CheckError);
  try {
    check_proof(bad);
  } catch (const CheckError& e) {
    REQUIRE(std::string(e.what()).find("free in the context") != std::string::npos);
  }
}

TEST_CASE("exists needs the right witness instance") {
  // |- ex X. X with witness 1 over |- 1
  Proof ok = p_exists(parse_formula("ex X. X"), f_one(), p_one());
  REQUIRE(sequent_alpha_equal(check_proof(ok), {parse_formula("ex X. X")}));
  Proof bad = p_exists(parse_formula("ex X. X"), f_bot(), p_one());
  REQUIRE_THROWS_AS(check_proof(bad), CheckError);
}

TEST_CASE("promotion weakening contraction shapes") {
  // |- !(1+1) from |- 1+1
  Proof pb = p_promotion(p_true());
  REQUIRE(sequent_alpha_equal(check_proof(pb), {parse_formula("!(1+1)")}));
  // functorial promotion with context
  Proof pc = p_promotion(p_par(p_ax(f_one())));  // premise |- 1 | bot ... single formula
  REQUIRE(check_proof(pc).size() == 1);
  Proof chain = p_promotion(p_comp_chain(f_one(), 1));  // |- ?~1, ?(1*bot), !1
  Sequent s = check_proof(chain);
  REQUIRE(s.size() == 3);
  REQUIRE(s[0]->conn == Conn::Quest);
  REQUIRE(s.back()->conn == Conn::Bang);
  // contraction requires the last two to agree
  Proof w = p_weakening(f_one(), p_weakening(f_one(), p_true()));
  Proof c = p_contraction(w);
  REQUIRE(sequent_alpha_equal(check_proof(c), {f_bool(), parse_formula("?1")}));
  REQUIRE_THROWS_AS(check_proof(p_contraction(p_weakening(f_bot(), p_weakening(f_one(), p_true())))),
                    CheckError);
}

TEST_CASE("church encodings check at closed types and at the variable") {
  for (const char* w : {"", "0", "1", "0110"}) {
    Proof p = church(w, f_bool());
    REQUIRE(sequent_alpha_equal(check_proof(p), {f_str_of(f_bool())}));
  }
  REQUIRE(sequent_alpha_equal(check_proof(church_generic("10")), {f_str()}));
}

TEST_CASE("snoc checks") {
  for (int x : {0, 1}) {
    Proof s = snoc_proof(x, f_bool());
    REQUIRE(sequent_alpha_equal(check_proof(s),
                                {f_lollipop(f_str_of(f_bool()), f_str_of(f_bool()))}));
    Proof sv = snoc_proof(x, f_var("X"));
    REQUIRE(sequent_alpha_equal(check_proof(sv),
                                {f_lollipop(f_str_of(f_var("X")), f_str_of(f_var("X")))}));
  }
}

TEST_CASE("proof json roundtrip") {
  Proof p = snoc_proof(1, f_bool());
  auto j = proof_to_json(p);
  Proof q = proof_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(sequent_alpha_equal(check_proof(q), check_proof(p)));
  REQUIRE(proof_alpha_equal(p, q));
  REQUIRE_THROWS(proof_from_json(nlohmann::json::parse("{\"rule\":\"nope\"}")));
}

TEST_CASE("substitute_proof instantiates a generic proof") {
  Proof id = p_par(p_ax(f_dualvar("X")));  // |- X -o X
  Proof inst = substitute_proof(id, "X", f_bool());
  REQUIRE(sequent_alpha_equal(check_proof(inst), {parse_formula("(1+1) -o (1+1)")}));
  Proof ch = substitute_proof(church("01", f_var("X")), "X", f_bool());
  REQUIRE(sequent_alpha_equal(check_proof(ch), {f_str_of(f_bool())}));
}

// ---- cut elimination ----

TEST_CASE("cut with an axiom vanishes") {
  Proof t = p_true();
  // |- Bool cut against ax |- ~Bool, Bool
  Proof ax = p_ax(dual(f_bool()));
  Proof c = p_cut(t, ax);
  REQUIRE(sequent_alpha_equal(check_proof(c), {f_bool()}));
  Proof r = cut_eliminate(c);
  REQUIRE_FALSE(has_cut(r));
  REQUIRE(sequent_alpha_equal(check_proof(r), {f_bool()}));
  REQUIRE(proof_alpha_equal(r, t));
}

TEST_CASE("cut-free proofs are untouched") {
  Proof p = church("01", f_bool());
  REQUIRE(proof_alpha_equal(cut_eliminate(p), p));
}

TEST_CASE("tensor against par reduces") {
  // apply the identity function to true:
  // f = |- Bool -o Bool; eta gadget |- Bool*~Bool, Bool consumes it
  Proof id_fn = p_par(p_ax(dual(f_bool())));               // |- ~Bool | Bool
  Proof gadget = p_tensor(p_true(), p_ax(dual(f_bool())));  // |- Bool*~Bool, Bool
  Sequent gs = check_proof(gadget);
  REQUIRE(gs.size() == 2);
  REQUIRE(alpha_equal(gs[0], dual(parse_formula("(1+1) -o (1+1)"))));
  Proof app = p_cut(id_fn, gadget);
  Sequent as = check_proof(app);
  REQUIRE(sequent_alpha_equal(as, {f_bool()}));
  Proof nf = cut_eliminate(app);
  REQUIRE_FALSE(has_cut(nf));
  REQUIRE(sequent_alpha_equal(check_proof(nf), {f_bool()}));
}

TEST_CASE("plus against with selects a branch") {
  // consumer |- ~Bool&~Bool ... : with over two bot-extended branches
  // build |- ~(1+1), 1 deciding by cases: left -> 1, right -> 1
  Proof lbranch = p_bot(p_one());                   // |- 1, bot
  Proof rbranch = p_bot(p_one());                   // |- 1, bot
  Proof wit = p_with(lbranch, rbranch);             // |- 1, bot & bot
  Proof cutp = p_cut(p_true(), p_move(wit, 0, 1));  // cut Bool against |- bot&bot, 1
  REQUIRE(sequent_alpha_equal(check_proof(cutp), {f_one()}));
  Proof nf = cut_eliminate(cutp);
  REQUIRE_FALSE(has_cut(nf));
  REQUIRE(sequent_alpha_equal(check_proof(nf), {f_one()}));
  REQUIRE(proof_alpha_equal(nf, p_one()));
}

TEST_CASE("forall against exists substitutes the witness") {
  Proof id_poly = p_forall("X", p_par(p_ax(f_dualvar("X"))));  // |- all X. X -o X
  // consumer: instantiate at Bool and apply to true
  Fm body_dual = dual(parse_formula("~X|X"));  // X * ~X
  Proof gadget = p_tensor(p_true(), p_ax(dual(f_bool())));  // |- Bool*~Bool, Bool
  Proof ex = p_exists(parse_formula("ex X. X*~X"), f_bool(), p_move(gadget, 0, 1));
  Proof cutp = p_cut(id_poly, p_move(ex, 0, 1));
  (void)body_dual;
  REQUIRE(sequent_alpha_equal(check_proof(cutp), {f_bool()}));
  Proof nf = cut_eliminate(cutp);
  REQUIRE_FALSE(has_cut(nf));
  REQUIRE(sequent_alpha_equal(check_proof(nf), {f_bool()}));
}

TEST_CASE("promotion against weakening and contraction") {
  Proof box = p_promotion(p_true());  // |- !Bool
  // weakening side: |- 1, ?~Bool
  Proof weak = p_weakening(dual(f_bool()), p_one());
  Proof cutw = p_cut(box, p_move(weak, 0, 1));
  REQUIRE(sequent_alpha_equal(check_proof(cutw), {f_one()}));
  Proof nfw = cut_eliminate(cutw);
  REQUIRE_FALSE(has_cut(nfw));
  REQUIRE(sequent_alpha_equal(check_proof(nfw), {f_one()}));

  // contraction side: duplicate the box and rebuild both copies
  Proof two = p_weakening(dual(f_bool()), p_weakening(dual(f_bool()), p_one()));
  Proof contr = p_contraction(two);  // |- 1, ?~Bool
  Proof cutc = p_cut(box, p_move(contr, 0, 1));
  REQUIRE(sequent_alpha_equal(check_proof(cutc), {f_one()}));
  Proof nfc = cut_eliminate(cutc);
  REQUIRE_FALSE(has_cut(nfc));
  REQUIRE(sequent_alpha_equal(check_proof(nfc), {f_one()}));
}

TEST_CASE("subject reduction across stock cuts") {
  // cut church words against snoc at a closed type and normalize
  for (const char* w : {"", "1", "00"}) {
    for (int x : {0, 1}) {
      Proof word = church(w, f_bool());
      Proof sn = snoc_open(x, f_bool());  // |- Str', Str
      Proof app = p_cut(word, sn);
      Sequent s = check_proof(app);
      REQUIRE(sequent_alpha_equal(s, {f_str_of(f_bool())}));
      Proof nf = cut_eliminate(app);
      REQUIRE_FALSE(has_cut(nf));
      REQUIRE(sequent_alpha_equal(check_proof(nf), s));
    }
  }
}

TEST_CASE("fuel exhaustion is reported distinctly") {
  Proof word = church("0110", f_bool());
  Proof sn = snoc_open(1, f_bool());
  Proof app = p_cut(word, sn);
  REQUIRE_THROWS_AS(cut_eliminate(app, 5), FuelError);
}
