import pytest

from conftest import model_text
from fsc.errors import ParseError
from fsc.lang import syntax as ast
from fsc.lang.parser import parse, parse_expression
from fsc.lang.printer import format_expr, format_spec

EXAMPLE = """
plant automaton ExampleAutomaton:
  controllable start, process;
  uncontrollable finish;
  disc int c = 0;
  location Idle:
    initial; marked;
    edge start goto Busy;
  location Busy:
    edge process when c < 5 do c := c + 1;
    edge finish when c > 4 do c := 0 goto Idle;
end
"""


class TestDeclarations:
    def test_example_automaton_shape(self):
        spec = parse(EXAMPLE)
        (decl,) = spec.declarations
        assert isinstance(decl, ast.AutomatonDecl)
        assert decl.kind == "plant"
        assert decl.name == "ExampleAutomaton"
        assert len(decl.body.locations) == 2
        assert sum(len(e.names) for e in decl.body.events) == 3
        assert len(decl.body.disc_vars) == 1

    def test_instance(self):
        spec = parse("F1: FEATURE();")
        (decl,) = spec.declarations
        assert decl == ast.InstanceDecl("F1", "FEATURE", ())

    def test_plant_invariant_conjunction(self):
        spec = parse("plant invariant sys_valid and cost_valid;")
        (decl,) = spec.declarations
        assert isinstance(decl, ast.PlantInvariantDecl)
        assert isinstance(decl.expr, ast.Binary) and decl.expr.op == "and"

    def test_requirement_forms(self):
        spec = parse(
            "requirement not(Coffee.Coffee and Tea.Tea);\n"
            "requirement Coffee.coffee needs CoinPresence.CoinPresent;\n"
            "requirement automaton R:\n location: initial; marked;\n edge A.x;\nend\n")
        kinds = [type(d) for d in spec.declarations]
        assert kinds == [ast.RequirementInvariantDecl, ast.EventConditionDecl,
                         ast.AutomatonDecl]
        assert spec.declarations[2].kind == "requirement"

    def test_plant_without_automaton_keyword(self):
        spec = parse("plant F1:\n disc bool present in any;\n location: initial; marked;\nend")
        (decl,) = spec.declarations
        assert isinstance(decl, ast.AutomatonDecl) and decl.name == "F1"

    def test_def_with_params(self):
        spec = parse("plant def BallFeature(alg colordomain clr):\n"
                     " disc bool present in any;\n location: initial; marked;\nend")
        (decl,) = spec.declarations
        assert isinstance(decl, ast.AutomatonDefDecl)
        assert decl.params[0].name == "clr"
        assert decl.params[0].type == ast.NamedType("colordomain")

    def test_supervisor_alphabet(self):
        spec = parse("supervisor automaton sup:\n"
                     " alphabet Coin.insert, Cancel.cancel;\n"
                     " location: initial; marked;\n"
                     "  edge Coin.insert when true;\n"
                     "  edge Cancel.cancel when CoffeePoured.NotPoured;\nend")
        (decl,) = spec.declarations
        assert decl.kind == "supervisor"
        assert len(decl.body.alphabet) == 2

    def test_multi_event_edge(self):
        spec = parse("plant automaton A:\n location L:\n  initial; marked;\n"
                     "  edge Coffee.done, Tea.done when not FR.present;\nend")
        edge = spec.declarations[0].body.locations[0].edges[0]
        assert [str(e) for e in edge.events] == ["Coffee.done", "Tea.done"]

    def test_monitor_flag(self):
        spec = parse("plant automaton M:\n monitor;\n location: initial; marked;\n"
                     "  edge A.e;\nend")
        assert spec.declarations[0].body.monitor

    def test_int_range_declaration(self):
        spec = parse("requirement automaton R:\n disc int[0..2] count = 0;\n"
                     " location: initial; marked;\n  edge A.e when count < 2 do count := count + 1;\nend")
        dv = spec.declarations[0].body.disc_vars[0]
        assert dv.type == ast.IntType(0, 2)

    def test_trailing_tokens_rejected(self):
        with pytest.raises(ParseError):
            parse("plant invariant true; garbage")

    def test_marked_predicate_unsupported(self):
        with pytest.raises(ParseError, match="unsupported construct"):
            parse("plant automaton A:\n location L:\n  initial; marked L;\nend")

    def test_syntax_error_has_span(self):
        with pytest.raises(ParseError) as err:
            parse("plant automaton A\n location L: initial;\nend")
        assert err.value.span.line == 2  # points at the unexpected token


class TestExpressions:
    def test_precedence_not_over_and_over_or(self):
        e = parse_expression("not a and b or c")
        assert e == ast.Binary("or",
                               ast.Binary("and",
                                          ast.Unary("not", ast.Name(("a",))),
                                          ast.Name(("b",))),
                               ast.Name(("c",)))

    def test_implies_right_associative(self):
        e = parse_expression("a => b => c")
        assert e == ast.Binary("=>", ast.Name(("a",)),
                               ast.Binary("=>", ast.Name(("b",)), ast.Name(("c",))))

    def test_iff_binds_loosest(self):
        e = parse_expression("a <=> b => c")
        assert e.op == "<=>"
        assert e.right.op == "=>"

    def test_conditional(self):
        e = parse_expression("if present : clr else NA end")
        assert isinstance(e, ast.IfExpr)
        assert e.orelse == ast.Name(("NA",))

    def test_comparison_no_chaining(self):
        with pytest.raises(ParseError):
            parse_expression("a < b < c")

    def test_arithmetic(self):
        e = parse_expression("a + b * c - 1")
        assert e.op == "-"
        assert e.left.op == "+"
        assert e.left.right.op == "*"


class TestRoundTrip:
    MODELS = [
        "machine_example.fsc", "ball_attributed.fsc", "coffee_components.fsc",
        "coffee_features_static.fsc", "coffee_features_static_nocost.fsc",
        "coffee_features_dynamic_strict.fsc", "coffee_features_relaxed_fxfo.fsc",
        "coffee_full.fsc", "coffee_fm_block.fsc", "coffee_fm_swap.fsc",
        "bcs_features_dynamic.fsc", "bcs_features_static.fsc",
        "bcs_alarm_fragment.fsc",
    ]

    @pytest.mark.parametrize("name", MODELS)
    def test_print_parse_identity(self, name):
        spec = parse(model_text(name))
        printed = format_spec(spec)
        assert parse(printed) == spec

    def test_expression_parens_preserved_semantically(self):
        for text in [
            "(a or b) and c",
            "not (a and b)",
            "a - (b - c)",
            "(a => b) => c",
            "x = 2 and y < 3",
            "if a : 1 else 2 end + 3",
        ]:
            e = parse_expression(text)
            assert parse_expression(format_expr(e)) == e

    def test_random_expressions_round_trip(self):
        from hypothesis import given, settings
        from hypothesis import strategies as st

        atoms = st.one_of(
            st.booleans().map(ast.Lit),
            st.integers(0, 99).map(ast.Lit),
            st.sampled_from(["a", "b", "F1"]).map(lambda n: ast.Name((n,))),
            st.just(ast.Name(("A", "present"))),
        )

        def extend(children):
            bool_ops = st.sampled_from(["and", "or", "=>", "<=>", "=", "!=",
                                        "<", "<=", ">", ">=", "+", "-", "*"])
            return st.one_of(
                st.tuples(bool_ops, children, children).map(
                    lambda t: ast.Binary(t[0], t[1], t[2])),
                children.map(lambda e: ast.Unary("not", e)),
                children.map(lambda e: ast.Unary("-", e)),
                st.tuples(children, children, children).map(
                    lambda t: ast.IfExpr(t[0], t[1], t[2])),
            )

        exprs = st.recursive(atoms, extend, max_leaves=25)

        @settings(max_examples=200, deadline=None)
        @given(exprs)
        def check(e):
            assert parse_expression(format_expr(e)) == e

        check()


MULTIFEATURE = """
uncontrollable swap12;

plant F1:
  disc bool present in any;
  location:
    initial; marked;
    edge swap12 when present do present := not(present);
end
plant F2:
  disc bool present in any;
  location:
    initial; marked;
    edge swap12 when present do present := not(present);
end

alg bool r1 = (F1.present and not(F2.present)) or (F2.present and not(F1.present));
alg bool sys_valid = r1;

plant automaton Validity:
  location:
    initial sys_valid; marked;
end
"""


class TestGoldenShapes:
    def test_multifeature_listing_resolves(self):
        from fsc.lang.resolver import resolve

        spec = resolve(parse(MULTIFEATURE))
        assert [a.name for a in spec.automata] == ["F1", "F2", "Validity"]
        swap = spec.event_index("swap12")
        assert all(swap in spec.automata[i].alphabet for i in (0, 1))

    def test_multifeature_as_written_has_dead_swap(self):
        # the verbatim guards demand both presences, so from an exclusive-or
        # initial state the shared event never fires; the feature kernel's
        # swap lowering uses the working unguarded toggle instead
        from fsc.lang.resolver import resolve
        from fsc.semantics import explore

        ts = explore(resolve(parse(MULTIFEATURE)))
        assert ts.state_count == 2
        assert ts.transition_count == 0

    def test_reconfiguration_phase_requirements_resolve(self):
        from conftest import model_text
        from fsc.lang.resolver import resolve

        text = model_text("coffee_full.fsc") + (
            "\nrequirement Cancel.cancel needs not(FE.present and FD.present);"
            "\nrequirement Sweet.Sugar => FS.present;\n")
        spec = resolve(parse(text))
        assert len(spec.requirement_invariants) == 4
