use holo_browser::{Demo, Style};

#[test]
fn robust_demo_beats_nonrobust() {
    let n = Demo::train(30, 30, 1.0, false).unwrap();
    let r = Demo::train(30, 30, 1.0, true).unwrap();
    assert_eq!(r.crossings(), 2);
    assert!(n.crossings() > 2);
    assert!(r.energy() < n.energy());
    assert!(r.curve_length() < n.curve_length());
}

#[test]
fn renders_are_png_and_deterministic() {
    let d = Demo::train(12, 8, 1.0, true).unwrap();
    for style in [Style::Domain, Style::Profile, Style::Range] {
        let a = d.render(style, 96, false).unwrap();
        assert_eq!(&a[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(a, d.render(style, 96, false).unwrap());
    }
    assert_ne!(d.render(Style::Domain, 96, true).unwrap(), d.render(Style::Domain, 96, false).unwrap());
    assert!(Style::parse("heatmap").is_err());
}

#[test]
fn identity_flip_radius_is_distance_to_axis() {
    let d = Demo::identity().unwrap();
    let r = d.flip_radius(0.3, 0.2).unwrap().unwrap();
    assert!((r - 0.3).abs() < 5e-3, "{r}");
    assert_eq!(d.flip_radius(0.0, 0.5).unwrap(), None);
    assert!(d.eval(2.0, 0.0).is_err());
}

#[test]
fn limits_are_enforced() {
    assert!(Demo::train(1000, 8, 1.0, false).is_err());
    assert!(Demo::train(10, 8, -1.0, false).is_err());
}
