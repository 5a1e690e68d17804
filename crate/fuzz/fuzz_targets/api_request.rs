#![no_main]

use libfuzzer_sys::fuzz_target;
use periodlab_cli::api::{
    parse_request, BasisCheckRequest, CurveRequest, IntersectRequest, KleinVerifyRequest, LiftRequest,
    MonodromyRequest, PeriodsRequest, TransformRequest,
};

// First byte picks the endpoint, the rest is the request body.
fuzz_target!(|data: &[u8]| {
    let Some((&which, body)) = data.split_first() else { return };
    let err = match which % 8 {
        0 => parse_request::<CurveRequest>(body).err(),
        1 => parse_request::<MonodromyRequest>(body).err(),
        2 => parse_request::<LiftRequest>(body).err(),
        3 => parse_request::<IntersectRequest>(body).err(),
        4 => parse_request::<BasisCheckRequest>(body).err(),
        5 => parse_request::<TransformRequest>(body).err(),
        6 => parse_request::<PeriodsRequest>(body).err(),
        _ => parse_request::<KleinVerifyRequest>(body).err(),
    };
    if let Some(e) = err {
        assert_eq!(e.status, 400);
    }
});
