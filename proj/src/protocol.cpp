#include "rlpr/protocol.hpp"

#include "rlpr/baselines.hpp"
#include "rlpr/rlpr_node.hpp"

namespace rlpr {

std::unique_ptr<RoutingProtocol> make_protocol(ProtocolKind kind, const ScenarioConfig& cfg,
                                               NodeServices& services) {
  switch (kind) {
    case ProtocolKind::Rlpr:
      return std::make_unique<RlprNode>(cfg, services);
    case ProtocolKind::Aodv:
      return std::make_unique<AodvNode>(cfg, services);
    case ProtocolKind::RarpLite:
      return std::make_unique<RarpLiteNode>(cfg, services);
  }
  throw std::invalid_argument("unknown protocol");
}

}  // namespace rlpr
