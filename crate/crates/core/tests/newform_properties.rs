use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use num_rational::Ratio;
use proptest::prelude::*;

use sunit_fermat::lmfdb::{digest, parse_payload, ClientConfig, LmfdbClient, Source, BUNDLED};
use sunit_fermat::serre_mazur::{frey_arrangement, LmfdbNewform, NewformRecord};
use sunit_fermat::survey::{squarefree_scan, Family, ScanConfig};
use sunit_fermat::Error;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn frey_arrangement_invariants(x in -10_000i64..10_000, y in -10_000i64..10_000, perm in 0usize..6) {
        let z = -(x + y);
        prop_assume!(x != 0 && y != 0 && z != 0 && gcd(x, y) == 1);
        let t = [x, y, z];
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let f = frey_arrangement(t[order[0]], t[order[1]], t[order[2]]).unwrap();
        prop_assert_eq!(f.a.rem_euclid(4), 3);
        prop_assert_eq!(f.b.rem_euclid(2), 0);
        prop_assert_eq!(f.a + f.b + f.c, 0);
        let sign = if f.flipped { -1 } else { 1 };
        let mut got = [sign * f.a, sign * f.b, sign * f.c];
        let mut want = t;
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn frey_rejects_bad_triples(x in -500i64..500, y in -500i64..500, k in 2i64..5) {
        prop_assume!(x != 0 && y != 0 && x + y != 0);
        prop_assert!(frey_arrangement(k * x, k * y, -k * (x + y)).is_err());
        prop_assert!(frey_arrangement(x, y, 1 - x - y).is_err());
    }
}

#[test]
fn frey_examples() {
    let f = frey_arrangement(3, -4, 1).unwrap();
    assert_eq!((f.a, f.b, f.c, f.flipped), (3, -4, 1, false));
    let f = frey_arrangement(1, 1, -2).unwrap();
    assert_eq!((f.a, f.b, f.c, f.flipped), (-1, 2, -1, true));
    let f = frey_arrangement(5, -1, -4).unwrap();
    assert_eq!((f.a, f.b, f.c), (-1, -4, 5));
}

fn bundled(level: u64) -> &'static str {
    BUNDLED.iter().find(|(l, _)| *l == level).unwrap().1
}

#[test]
fn cache_round_trip_preserves_records() {
    for (level, payload) in BUNDLED {
        let (raw, recs) = parse_payload(*level, payload).unwrap();
        let again = serde_json::to_string(&serde_json::json!({ "data": raw })).unwrap();
        let (raw2, recs2) = parse_payload(*level, &again).unwrap();
        assert_eq!(raw, raw2);
        assert_eq!(recs, recs2);
    }
    let tmp = tempfile::tempdir().unwrap();
    let c = LmfdbClient::new(ClientConfig { cache_dir: Some(tmp.path().into()), offline: true, ..Default::default() });
    for level in [14, 74, 86] {
        let (first, s1) = c.fetch_with_source(level).unwrap();
        let (second, s2) = c.fetch_with_source(level).unwrap();
        assert_eq!((s1, s2), (Source::Fixture, Source::Cache));
        assert_eq!(first, second);
        assert_eq!(first, parse_payload(level, bundled(level)).unwrap().1);
    }
}

fn forms(level: u64) -> Vec<LmfdbNewform> {
    parse_payload(level, bundled(level)).unwrap().0
}

#[test]
fn deligne_check_rejects_corruption() {
    // a_3 of a rational form pushed outside [-2 sqrt 3, 2 sqrt 3]
    let mut f = forms(14).remove(0);
    assert!(NewformRecord::from_lmfdb(&f).is_ok());
    f.ap[1] = vec![4];
    assert!(NewformRecord::from_lmfdb(&f).is_err());
    // an irrational eigenvalue scaled far beyond the bound
    for level in [74, 86] {
        for mut f in forms(level).into_iter().filter(|f| f.field_poly.len() > 2) {
            assert!(NewformRecord::from_lmfdb(&f).is_ok());
            for c in f.ap[3].iter_mut() {
                *c *= 25;
            }
            assert!(NewformRecord::from_lmfdb(&f).is_err(), "{}", f.label);
        }
    }
    // a field polynomial that is not irreducible of the right degree
    let mut f = forms(74).into_iter().find(|f| f.field_poly.len() == 3).unwrap();
    f.field_poly = vec![0, 0, 1];
    assert!(NewformRecord::from_lmfdb(&f).is_err());
}

#[test]
fn corrupt_cache_entries_are_refetched() {
    let tmp = tempfile::tempdir().unwrap();
    let c = LmfdbClient::new(ClientConfig { cache_dir: Some(tmp.path().into()), offline: true, ..Default::default() });
    c.fetch_newforms(74).unwrap();
    let path = std::fs::read_dir(tmp.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("74.2.a.a", "74.2.a.z", 1)).unwrap();
    let (_, src) = c.fetch_with_source(74).unwrap();
    assert_eq!(src, Source::Fixture);
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(c.fetch_with_source(74).unwrap().1, Source::Fixture);
    assert_eq!(c.fetch_with_source(74).unwrap().1, Source::Cache);
}

/// A loopback server answering `count` requests with `status` and `body`;
/// returns the base URL and a handle yielding the request lines.
fn serve(status: &'static str, body: String, count: usize) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let h = thread::spawn(move || {
        let mut seen = vec![];
        for stream in listener.incoming().take(count) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            seen.push(line.trim().to_string());
            loop {
                let mut h = String::new();
                if reader.read_line(&mut h).unwrap() == 0 || h == "\r\n" {
                    break;
                }
            }
            write!(
                stream,
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
        seen
    });
    (url, h)
}

fn online(url: String, cache: Option<&std::path::Path>) -> LmfdbClient {
    LmfdbClient::new(ClientConfig {
        base_url: url,
        cache_dir: cache.map(|p| p.to_path_buf()),
        offline: false,
        timeout: Duration::from_secs(10),
        ..Default::default()
    })
}

#[test]
fn fetches_from_a_local_server_then_caches() {
    let (url, h) = serve("200 OK", bundled(74).to_string(), 1);
    let tmp = tempfile::tempdir().unwrap();
    let c = online(url, Some(tmp.path()));
    let (recs, src) = c.fetch_with_source(74).unwrap();
    assert_eq!(src, Source::Network);
    assert_eq!(recs.len(), 2);
    // the server is gone after one request; this must come from the cache
    let (again, src) = c.fetch_with_source(74).unwrap();
    assert_eq!(src, Source::Cache);
    assert_eq!(recs, again);
    let reqs = h.join().unwrap();
    assert_eq!(reqs.len(), 1);
    assert!(reqs[0].starts_with("GET /api/mf_hecke_nf/?level=74&weight=2&char_orbit_index=1"), "{}", reqs[0]);
}

#[test]
fn server_errors_are_transport_errors() {
    let (url, h) = serve("500 Internal Server Error", "{}".into(), 1);
    let c = online(url, None);
    assert!(matches!(c.fetch_newforms(14), Err(Error::Transport(_))));
    h.join().unwrap();

    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let c = online(format!("http://127.0.0.1:{port}"), None);
    assert!(matches!(c.fetch_newforms(14), Err(Error::Transport(_))));
}

#[test]
fn malformed_server_payload_reports_digest() {
    let body = "{\"data\": [{\"label\": 7}]}".to_string();
    let (url, h) = serve("200 OK", body.clone(), 1);
    let c = online(url, None);
    match c.fetch_newforms(14) {
        Err(Error::Parse { digest: d, .. }) => assert_eq!(d, digest(&body)),
        other => panic!("unexpected {other:?}"),
    }
    h.join().unwrap();
}

const SNAPSHOT: &str = include_str!("snapshots/density_real_50.json");

#[test]
fn density_snapshot_is_stable_across_thread_counts() {
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let rep = pool.install(|| squarefree_scan(50, Family::Real, &ScanConfig::default()).unwrap());
        let json = serde_json::to_string_pretty(&rep).unwrap();
        assert_eq!(json.trim(), SNAPSHOT.trim(), "{threads} threads");
        let total: Ratio<u64> = ["split", "inert", "ramified"].iter().map(|c| rep.proportion(c)).sum();
        assert_eq!(total, Ratio::from_integer(1));
        assert_eq!(rep.verdicts.values().sum::<u64>(), rep.total);
    }
}

#[test]
fn inert_fraction_is_exact() {
    let cfg = ScanConfig { classify_only: true, ..Default::default() };
    let rep = squarefree_scan(1000, Family::Imaginary, &cfg).unwrap();
    // squarefree d <= 1000 with -d = 5 mod 8 is d = 3 mod 8
    let oracle = (1..=1000u64)
        .filter(|d| d % 8 == 3 && (2..=31u64).all(|k| d % (k * k) != 0))
        .count() as u64;
    assert_eq!(rep.splitting["inert"], oracle);
    assert_eq!(rep.proportion("inert"), Ratio::new(oracle, rep.total));
    assert_eq!(rep.splitting_proportions["inert"], Ratio::new(oracle, rep.total).to_string());
}
