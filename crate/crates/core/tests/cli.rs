use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Command, Output, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

const BIN: &str = env!("CARGO_BIN_EXE_livehole");

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], src: &str) -> String {
    let out = run(args, src);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], src: &str) -> (i32, String, String) {
    let out = run(args, src);
    let s = |b: Vec<u8>| String::from_utf8(b).unwrap();
    (out.status.code().unwrap(), s(out.stdout), s(out.stderr))
}

#[test]
fn check_prints_types() {
    assert_eq!(ok(&["check", "-"], "c"), "b\n");
    assert_eq!(ok(&["check", "-"], "\\x:num. x + ?"), "num -> num\n");
    assert_eq!(ok(&["check", "-"], "(\\x:?. x x) (\\x:?. x x)"), "?\n");
    let (c, _, err) = code(&["check", "-"], "(\\x:b. x)\n  1");
    assert_eq!(c, 1);
    assert!(err.contains("2:3: error:"), "{err}");
    let (c, _, err) = code(&["check", "-"], "y");
    assert_eq!(c, 1);
    assert!(err.contains("unbound variable `y`"), "{err}");
    assert!(!err.contains("warning"), "{err}");
}

#[test]
fn check_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.lh");
    std::fs::write(&path, "inl(c) : b + num").unwrap();
    assert_eq!(ok(&["check", path.to_str().unwrap()], ""), "b + num\n");
    let (c, _, _) = code(&["check", dir.path().join("missing").to_str().unwrap()], "");
    assert_eq!(c, 1);
}

#[test]
fn elaborate_shows_casts_and_holes() {
    assert_eq!(ok(&["elaborate", "-"], "?"), "?1[]\n1 :: ?[·]\n");
    assert_eq!(ok(&["elaborate", "-"], "c : ?"), "c<b => ?>\n");
    let out = ok(&["elaborate", "-"], "(\\x:num. x + ?u) 1");
    assert!(out.ends_with("u :: num[x : num]\n"), "{out}");
}

#[test]
fn eval_reports_outcomes() {
    assert_eq!(ok(&["eval", "-"], "1 + ?"), "1 + ?1[]\noutcome: indet (0 steps)\n");
    assert_eq!(ok(&["eval", "-"], "(\\x:num. x + 1) 2"), "3\noutcome: boxed (4 steps)\n");
    let (c, out, _) = code(&["eval", "-"], "((c : ?) : num) + 1");
    assert_eq!(c, 0);
    assert!(out.starts_with("c<b =/=> num> + 1\noutcome: indet"), "{out}");
    let (c, out, _) = code(&["--fuel", "100", "eval", "-"], "(\\x:?. x x) (\\x:?. x x)");
    assert_eq!(c, 2);
    assert!(out.ends_with("outcome: fuel-exhausted (100 steps)\n"), "{out}");
    let (c, _, err) = code(&["eval", "-"], "9223372036854775807 + 1");
    assert_eq!(c, 4);
    assert!(err.contains("overflow"), "{err}");
}

#[test]
fn eval_trace_names_rules() {
    let out = ok(&["eval", "--trace", "-"], "(\\x:num. x + ?u) 1");
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "[1] ITCastId: (\\x:num. x + ?u[x/x]) 1<num => num>");
    assert_eq!(lines[2], "[3] ITLam: 1 + ?u[1/x]");
    assert_eq!(lines[4], "outcome: indet (3 steps)");
}

#[test]
fn free_variables_as_holes() {
    let (c, out, err) = code(&["--free-vars-as-holes", "eval", "-"], "y + 1");
    assert_eq!(c, 0);
    assert_eq!(out, "?y[] + 1\noutcome: indet (0 steps)\n");
    assert!(err.contains("1:1: warning: free variable `y`"), "{err}");
}

#[test]
fn fill_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.lh");
    std::fs::write(&path, "let f : num -> num = \\x. ?1 in f 90 + (f 85 + f 72)").unwrap();
    let p = path.to_str().unwrap();
    let out = ok(&["fill", p, "--hole", "1", "--with", "x + 1", "--verify"], "");
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "250");
    assert!(lines[1].starts_with("outcome: boxed ("), "{out}");
    assert_eq!(lines[2], "program: (\\f:num -> num. f 90 + (f 85 + f 72)) ((\\x. x + 1) : num -> num)");
    assert!(lines[3].starts_with("verify: agrees"), "{out}");

    let (c, _, err) = code(&["fill", p, "--hole", "1", "--with", "c"], "");
    assert_eq!(c, 1);
    assert!(err.contains("EASubsume"), "{err}");
    let (c, _, err) = code(&["fill", p, "--hole", "2", "--with", "1"], "");
    assert_eq!(c, 1);
    assert!(err.contains("no unfilled hole"), "{err}");
    let (c, out, _) = code(&["fill", p, "--hole", "1", "--with", "?"], "");
    assert_eq!(c, 0);
    assert!(out.contains("?2[90/x]"), "{out}");
}

#[test]
fn serve_honours_port_and_fuel() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(BIN)
        .args(["--fuel", "123", "serve"])
        .env("PORT", port.to_string())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let reply = loop {
        if let Ok(mut s) = TcpStream::connect(("127.0.0.1", port)) {
            s.write_all(b"POST /session HTTP/1.1\r\nHost: localhost\r\nContent-Length: 0\r\nConnection: close\r\n\r\n")
                .unwrap();
            let mut buf = String::new();
            s.read_to_string(&mut buf).unwrap();
            break buf;
        }
        assert!(Instant::now() < deadline, "server did not start");
        sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.contains("\"fuel\":123"), "{reply}");
}
