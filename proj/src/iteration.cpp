// placeholder: implementation lands with its module
namespace ealab {}
