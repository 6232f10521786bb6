use nseq_core::rules::{Calculus, RuleConfig};
use nseq_core::solver::{solve, Budget};
use nseq_core::term::{Sort, Symbol, TermStore};

fn main() {
    let case = std::env::args().nth(1).unwrap_or_default();
    let calc = match std::env::args().nth(2).as_deref() {
        Some("ext") => Calculus::Ext,
        _ => Calculus::Base,
    };
    let mut st = TermStore::new();
    let asserts: Vec<_> = match case.as_str() {
        "satconst" => {
            let s = st.var("s", Sort::nseq(Sort::Int));
            let zero = st.numeral(0);
            let one = st.numeral(1);
            let five = st.numeral(5);
            let c = st.mk(Symbol::NseqConst, vec![zero, one, five]).unwrap();
            let a1 = st.eq(s, c).unwrap();
            let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
            let a2 = st.eq(g, five).unwrap();
            vec![a1, a2]
        }
        "reloc" => {
            let s = st.var("s", Sort::nseq(Sort::Int));
            let ten = st.numeral(10);
            let t = st.mk(Symbol::NseqRelocate, vec![s, ten]).unwrap();
            let (fst, lst) = st.bounds_terms(s).unwrap();
            let zero = st.numeral(0);
            let one = st.numeral(1);
            let three = st.numeral(3);
            let four = st.numeral(4);
            let a1 = st.eq(fst, zero).unwrap();
            let a2 = st.eq(lst, one).unwrap();
            let g1 = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
            let a3 = st.eq(g1, three).unwrap();
            let g2 = st.mk(Symbol::NseqGet, vec![t, ten]).unwrap();
            let a4 = st.eq(g2, four).unwrap();
            vec![a1, a2, a3, a4]
        }
        "oracle" => {
            let path = std::env::args().nth(2).expect("dbg oracle <path>");
            let text = std::fs::read_to_string(path).unwrap();
            let script = nseq_core::parser::parse_script(&text, &mut st).unwrap();
            let asserts = script.assertions();
            let dom = nseq_core::oracle::Domain::default();
            match nseq_core::oracle::enumerate_sat(&st, &asserts, &dom) {
                Ok(v) => println!("{}", if v.is_sat() { "sat" } else { "unsat" }),
                Err(e) => println!("budget: {e:?}"),
            }
            return;
        }
        "file" => {
            let path = std::env::args().nth(3).expect("dbg file <calc> <path>");
            let text = std::fs::read_to_string(path).unwrap();
            let script = nseq_core::parser::parse_script(&text, &mut st).unwrap();
            script.assertions()
        }
        "fuzz" => {
            use nseq_core::fuzz::{gen_instance, instance_script, FuzzConfig};
            use nseq_core::oracle::enumerate_sat;
            let cfg = FuzzConfig { count: 10, max_depth: 2, max_assertions: 4, ..Default::default() };
            for k in 0..cfg.count as u64 {
                let inst = gen_instance(&cfg, k);
                eprintln!("== instance {k} ({} assertions)", inst.assertions.len());
                let t0 = std::time::Instant::now();
                let o = enumerate_sat(&inst.store, &inst.assertions, &cfg.domain());
                eprintln!(
                    "   oracle: {:?} in {:?}",
                    o.map(|v| v.is_sat()),
                    t0.elapsed()
                );
                for c in [Calculus::Base, Calculus::Ext] {
                    let mut s2 = inst.store.clone();
                    let t0 = std::time::Instant::now();
                    let (v, stats) = solve(
                        &mut s2,
                        &inst.assertions,
                        c,
                        RuleConfig::default(),
                        &Budget::default(),
                    );
                    eprintln!("   {c:?}: {} in {:?} ({})", v.word(), t0.elapsed(), stats.to_json());
                    if let nseq_core::solver::Verdict::Unknown(r) = &v {
                        eprintln!("   reason: {r}");
                    }
                }
                if std::env::args().nth(2).as_deref() == Some("print") {
                    eprintln!("{}", instance_script(&inst));
                }
            }
            return;
        }
        _ => panic!("unknown case"),
    };
    let budget = Budget { max_decisions: 2000, max_lemmas: 5000, wall_ms: 20_000 };
    let (v, stats) = solve(&mut st, &asserts, calc, RuleConfig::default(), &budget);
    println!("{}", v.word());
    if let nseq_core::solver::Verdict::Unknown(r) = &v {
        println!("reason: {r}");
    }
    println!("{}", stats.to_json());
    println!("store size {}", st.len());
}
