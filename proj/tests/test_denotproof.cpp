#include <catch2/catch_amalgamated.hpp>

#include "ll2/cutelim.hpp"
#include "ll2/denotproof.hpp"
#include "ll2/stock.hpp"

using namespace ll2;

static Ctx cx;

TEST_CASE("true and false denote differently") {
  ProofDen t = denote_proof(p_true(), cx);
  ProofDen f = denote_proof(p_false(), cx);
  REQUIRE(t.nrows == 1);
  REQUIRE(f.nrows == 1);
  REQUIRE_FALSE(same_denotation(t, f));
  REQUIRE(t.flat == std::vector<TermId>{t_inl(t_unit())});
  REQUIRE(f.flat == std::vector<TermId>{t_inr(t_unit())});
}

TEST_CASE("identity proof of all X. X -o X denotes the diagonal pattern") {
  Proof id_poly = p_forall("X", p_par(p_ax(f_dualvar("X"))));
  ProofDen d = denote_proof(id_poly, cx);
  REQUIRE(d.is_closed());
  REQUIRE(d.nrows == 1);
  TermId t = d.flat[0];
  REQUIRE(tnode(t).kind == TK::Bind);
  REQUIRE(bind_graph(t).n == 1);
  TermId body = bind_body(t);
  REQUIRE(tnode(body).kind == TK::Pair);
  REQUIRE(tnode(body).a == tnode(body).b);
}

TEST_CASE("ax at an open formula denotes the diagonal over its nfs") {
  ProofDen d = denote_proof(p_ax(f_var("X")), cx);
  REQUIRE(d.slots == std::vector<std::string>{"X"});
  REQUIRE(d.nrows == 1);
  REQUIRE(d.open[0].slots[0].n == 1);
  REQUIRE(d.open[0].comps[0] == d.open[0].comps[1]);

  ProofDen e = denote_proof(p_ax(parse_formula("X -o X")), cx);
  REQUIRE(e.nrows == 3);  // diagonal of the three nfs
}

TEST_CASE("exists over 1 with witness 1 at target ex X. X is empty") {
  Proof pr = p_exists(parse_formula("ex X. X"), f_one(), p_one());
  ProofDen d = denote_proof(pr, cx);
  REQUIRE(d.nrows == 0);
}

TEST_CASE("exists compression drops patterns outside the existential web") {
  // the web of ex X. ~X|X is empty: its points would have to be
  // self-coherent for X * ~X, and none are (dually, all X. X*~X is blocked
  // by the eigenvariable condition). Packing the Bool identity gives the
  // empty clique.
  Proof idb = p_par(p_ax(dual(f_bool())));
  Proof pr = p_exists(parse_formula("ex X. ~X|X"), f_bool(), idb);
  ProofDen d = denote_proof(pr, cx);
  REQUIRE(d.nrows == 0);
}

TEST_CASE("exists compression keeps the observable behavior of a package") {
  // abstract data type: a value together with a boolean predicate on it;
  // pack (true, identity) at witness Bool, consume with the generic
  // "apply the predicate to the value" program; the composite is true.
  Fm a_body = parse_formula("X * (X -o (1+1))");
  Fm target = f_exists("X", a_body);
  Proof idb = p_par(p_ax(dual(f_bool())));
  Proof packed0 = p_tensor(p_true(), idb);  // |- Bool * (Bool -o Bool)
  Proof packed = p_exists(target, f_bool(), packed0);
  ProofDen dp = denote_proof(packed, cx);
  REQUIRE(dp.nrows >= 1);

  // consumer: |- all X. ~(X * (X -o Bool)), Bool
  Proof app = p_tensor(p_ax(f_dualvar("X")), p_ax(dual(f_bool())));
  // |- ~X, X * ~Bool, Bool
  Proof consume = p_move(app, 2, 0);  // |- Bool, ~X, X*~Bool
  consume = p_par(consume);           // |- Bool, ~X | (X*~Bool)
  consume = p_forall("X", consume);
  consume = p_move(consume, 1, 0);    // |- all X. ..., Bool
  REQUIRE(sequent_alpha_equal(check_proof(consume), {dual(target), f_bool()}));

  Proof cutp = p_cut(packed, consume);
  ProofDen before = denote_proof(cutp, cx);
  REQUIRE(before.nrows == 1);
  REQUIRE(before.flat == std::vector<TermId>{t_inl(t_unit())});
  ProofDen after = denote_proof(cut_eliminate(cutp), cx);
  REQUIRE(same_denotation(before, after));

  // packaging (false, negation) answers true as well; (false, identity)
  // answers false
  Proof neg = p_with(p_bot(p_false()), p_bot(p_true()));
  // |- Bool, bot&bot = |- Bool, ~Bool ... needs the function orientation:
  // build ~Bool | Bool from the with over swapped outputs
  Proof negfn = p_par(p_move(neg, 0, 1));  // |- (bot&bot) | Bool = Bool -o Bool
  Proof packedneg = p_exists(target, f_bool(), p_tensor(p_false(), negfn));
  Proof cutneg = p_cut(packedneg, consume);
  ProofDen dneg = denote_proof(cutneg, cx);
  REQUIRE(dneg.flat == std::vector<TermId>{t_inl(t_unit())});
  REQUIRE(same_denotation(dneg, denote_proof(cut_eliminate(cutneg), cx)));

  Proof packedfi = p_exists(target, f_bool(), p_tensor(p_false(), idb));
  Proof cutfi = p_cut(packedfi, consume);
  ProofDen dfi = denote_proof(cutfi, cx);
  REQUIRE(dfi.flat == std::vector<TermId>{t_inr(t_unit())});
  REQUIRE(same_denotation(dfi, denote_proof(cut_eliminate(cutfi), cx)));
}

TEST_CASE("cut invariance for the polymorphic identity applied at Bool") {
  Proof id_poly = p_forall("X", p_par(p_ax(f_dualvar("X"))));
  Proof gadget = p_tensor(p_true(), p_ax(dual(f_bool())));
  Proof ex = p_exists(parse_formula("ex X. X*~X"), f_bool(), p_move(gadget, 0, 1));
  Proof cutp = p_cut(id_poly, p_move(ex, 0, 1));
  ProofDen before = denote_proof(cutp, cx);
  ProofDen after = denote_proof(cut_eliminate(cutp), cx);
  REQUIRE(same_denotation(before, after));
  REQUIRE(before.nrows == 1);
  REQUIRE(before.flat == std::vector<TermId>{t_inl(t_unit())});
}

TEST_CASE("promotion weakening contraction actions") {
  ProofDen bt = denote_proof(p_promotion(p_true()), cx);
  // cliques of Bool realizable from {inl *}: {} and {inl *}
  REQUIRE(bt.nrows == 2);
  ProofDen w = denote_proof(p_weakening(f_bool(), p_one()), cx);
  REQUIRE(w.nrows == 1);
  REQUIRE(bang_elems(w.flat[1]).empty());
  // contract two weakened channels
  Proof two = p_weakening(f_bool(), p_weakening(f_bool(), p_one()));
  ProofDen c = denote_proof(p_contraction(two), cx);
  REQUIRE(c.nrows == 1);
  REQUIRE(bang_elems(c.flat[1]).empty());
}

TEST_CASE("promotion with context forms unions of realizers") {
  // |- ~Bool, Bool (identity relation), promoted:
  // members ((union of inputs), clique of outputs)
  ProofDen d = denote_proof(p_promotion(p_ax(dual(f_bool()))), cx);
  // cliques of the 4-point identity-relation web, both components
  // moving together: {}, {l}, {r}: empty, and two singleton boxes
  REQUIRE(d.width == 2);
  REQUIRE(d.nrows == 3);
  for (size_t r = 0; r < d.nrows; ++r) {
    auto in = bang_elems(d.flat[r * 2]);
    auto out = bang_elems(d.flat[r * 2 + 1]);
    REQUIRE(in == out);
  }
}

TEST_CASE("church denotations distinguish words at Bool") {
  std::set<std::vector<TermId>> seen;
  for (const char* w : {"", "0", "1", "01", "10", "11"}) {
    ProofDen d = denote_proof(church(w, f_bool()), cx);
    REQUIRE(d.width == 1);
    REQUIRE(d.nrows > 0);
    REQUIRE(seen.insert(d.flat).second);  // all distinct
  }
}

TEST_CASE("cut invariance: snoc against church equals the longer word") {
  for (const char* w : {"", "1", "01"}) {
    for (int x : {0, 1}) {
      Proof app = p_cut(church(w, f_bool()), snoc_open(x, f_bool()));
      ProofDen lhs = denote_proof(app, cx);
      ProofDen direct = denote_proof(church(std::string(w) + char('0' + x), f_bool()), cx);
      REQUIRE(same_denotation(lhs, direct));
      ProofDen after = denote_proof(cut_eliminate(app), cx);
      REQUIRE(same_denotation(lhs, after));
    }
  }
}

TEST_CASE("with and plus actions") {
  // |- Bool & Bool by pairing true and false
  Proof wb = p_with(p_true(), p_false());
  ProofDen d = denote_proof(wb, cx);
  REQUIRE(d.nrows == 2);
  // tagged union: inl(inl *) and inr(inr *)
  std::vector<TermId> want = {t_inl(t_inl(t_unit())), t_inr(t_inr(t_unit()))};
  std::sort(want.begin(), want.end());
  std::vector<TermId> got = d.flat;
  std::sort(got.begin(), got.end());
  REQUIRE(got == want);
}

TEST_CASE("top denotes the empty clique") {
  Proof t = p_top({f_one()});
  ProofDen d = denote_proof(t, cx);
  REQUIRE(d.nrows == 0);
  REQUIRE(d.width == 2);
}

TEST_CASE("open tensor glues bound spaces") {
  // ax X tensored with ax X: |- X, ~X * X, ~X with shared-variable nfs
  Proof t = p_tensor(p_ax(f_var("X")), p_ax(f_dualvar("X")));
  ProofDen d = denote_proof(t, cx);
  REQUIRE(d.slots.size() == 1);
  // gluings of two diagonal one-variable nfs: identified, and the two
  // two-variable patterns
  REQUIRE(d.nrows == 3);
  bool saw1 = false, saw2 = false;
  for (auto& nf : d.open) {
    if (nf.slots[0].n == 1) saw1 = true;
    if (nf.slots[0].n == 2) saw2 = true;
  }
  REQUIRE((saw1 && saw2));
}

TEST_CASE("denote_proof refuses fincoh violations") {
  // |- Str (with the quantifier) contains an open exponential
  REQUIRE_THROWS_AS(denote_proof(church_generic("0"), cx), std::invalid_argument);
}

TEST_CASE("cut invariance across the tensor/par key case") {
  Proof id_fn = p_par(p_ax(dual(f_bool())));
  Proof gadget = p_tensor(p_true(), p_ax(dual(f_bool())));
  Proof app = p_cut(id_fn, gadget);
  ProofDen before = denote_proof(app, cx);
  ProofDen after = denote_proof(cut_eliminate(app), cx);
  REQUIRE(same_denotation(before, after));
  REQUIRE(before.flat == std::vector<TermId>{t_inl(t_unit())});
}
