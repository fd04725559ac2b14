// Braces inside strings and comments must not confuse the body scan.
var AB_MSG = "{ blocked }";

function adsAreBlocked() {
  var probe = document.querySelector(".ad-slot-bait"); // } not a brace
  /* { also not a brace */
  var tpl = `${probe ? "{" : "}"}`;
  if (!probe || probe.offsetHeight === 0) {
    console.log("blocked: " + AB_MSG + tpl);
    return true;
  }
  return false;
}

if (adsAreBlocked()) document.title = "[ad blocker]";
