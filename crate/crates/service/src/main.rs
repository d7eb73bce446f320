use musicswarm_service::{router, AppState, ServiceConfig};

const LOG_ENV: &str = "MUSICSWARM_LOG";
const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[tokio::main]
async fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "info")).init();
    let addr = std::env::args().nth(1).unwrap_or_else(|| DEFAULT_ADDR.to_string());
    let listener = match tokio::net::TcpListener::bind(&addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("musicswarm-service: cannot bind {addr}: {e}");
            std::process::exit(2);
        }
    };
    log::info!("listening on {addr}");
    let state = AppState::new(ServiceConfig::default());
    let served = axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    state.shutdown();
    if let Err(e) = served {
        eprintln!("musicswarm-service: {e}");
        std::process::exit(1);
    }
}
